#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "gp/network.hpp"
#include "helpers.hpp"

using namespace geoprune;
using namespace gptest;

TEST_CASE("two-vertex network arithmetic") {
    RoadNetwork net;
    net.add_vertex(0, 0);
    net.add_vertex(800, 0);
    net.add_edge(0, 1, 800.0);
    net.add_edge(1, 0, 800.0);
    TravelTimeProvider travel(net, 13.333333333333334);
    auto v0 = NetworkPosition::at_vertex(0);
    auto v1 = NetworkPosition::at_vertex(1);
    CHECK(travel.travel_time(v0, v0) == 0.0);
    CHECK(travel.travel_time(v0, v1) == doctest::Approx(60.0));
    Path p = travel.shortest_path(v0, v1);
    REQUIRE(p.vertices.size() == 2);
    CHECK(p.vertices[0] == 0);
    CHECK(p.vertices[1] == 1);
    Path self = travel.shortest_path(v0, v0);
    CHECK(self.length == 0.0);
}

TEST_CASE("grid distances match the Floyd-Warshall oracle") {
    RoadNetwork net = make_grid(5, 5, 137.0);
    auto fw = floyd_warshall(net);
    TravelTimeProvider travel(net, 10.0);
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> vertex(0, 24);
    for (int i = 0; i < 500; ++i) {
        VertexId a = vertex(rng), b = vertex(rng);
        double got = travel.travel_time(NetworkPosition::at_vertex(a),
                                        NetworkPosition::at_vertex(b));
        CHECK(got == doctest::Approx(fw[a][b] / 10.0).epsilon(1e-9));
        Path p = travel.shortest_path(NetworkPosition::at_vertex(a),
                                      NetworkPosition::at_vertex(b));
        CHECK(p.length == doctest::Approx(fw[a][b]).epsilon(1e-9));
        // Euclidean lower bound (the triangle-inequality premise)
        CHECK(p.length + 1e-9 >= euclidean(net.coord(a), net.coord(b)));
    }
}

TEST_CASE("mid-edge positions decompose into edge offsets") {
    RoadNetwork net = make_grid(3, 3, 100.0);
    TravelTimeProvider travel(net, 10.0);
    // position 40 m into the edge 0 -> 1
    EdgeId e01 = -1;
    for (const auto& e : net.out_edges(0))
        if (e.other == 1) e01 = e.edge;
    REQUIRE(e01 >= 0);
    auto mid = NetworkPosition::on_edge(net, e01, 40.0);
    CHECK_FALSE(mid.is_vertex());
    Point c = position_coord(net, mid);
    CHECK(c.x == doctest::Approx(40.0));
    CHECK(c.y == doctest::Approx(0.0));
    // forward to vertex 1: remaining 60 m
    CHECK(travel.travel_time(mid, NetworkPosition::at_vertex(1)) == doctest::Approx(6.0));
    // back to vertex 0 requires driving to 1 then returning
    CHECK(travel.travel_time(mid, NetworkPosition::at_vertex(0)) == doctest::Approx(16.0));
    // same-edge forward shortcut
    auto further = NetworkPosition::on_edge(net, e01, 90.0);
    CHECK(travel.travel_time(mid, further) == doctest::Approx(5.0));
    // offsets 0 / length canonicalize to vertices
    CHECK(NetworkPosition::on_edge(net, e01, 0.0).is_vertex());
    CHECK(NetworkPosition::on_edge(net, e01, 100.0).vertex == 1);
}

TEST_CASE("advance walks the path and clamps") {
    RoadNetwork net;
    net.add_vertex(0, 0);
    net.add_vertex(60, 0);
    net.add_vertex(60, 80);
    net.add_edge(0, 1, 60.0);
    net.add_edge(1, 2, 80.0);
    TravelTimeProvider travel(net, 1.0);
    Path p = travel.shortest_path(NetworkPosition::at_vertex(0),
                                  NetworkPosition::at_vertex(2));
    CHECK(p.length == doctest::Approx(140.0));
    CHECK(advance(net, p, 0.0) == p.start);
    CHECK(advance(net, p, 1000.0) == p.end);
    NetworkPosition m = advance(net, p, 100.0);  // 40 m into the second edge
    CHECK_FALSE(m.is_vertex());
    CHECK(m.offset == doctest::Approx(40.0));
    CHECK(net.edge(m.edge).from == 1);
}

TEST_CASE("advance is additive") {
    RoadNetwork net = make_grid(4, 4, 50.0);
    TravelTimeProvider travel(net, 1.0);
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> vertex(0, 15);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        VertexId s = vertex(rng), t = vertex(rng);
        Path p = travel.shortest_path(NetworkPosition::at_vertex(s),
                                      NetworkPosition::at_vertex(t));
        double a = frac(rng) * p.length;
        double b = frac(rng) * (p.length - a);
        NetworkPosition direct = advance(net, p, a + b);
        NetworkPosition step = advance(net, p, a);
        // re-plan remaining path from the intermediate position
        Path rest = travel.shortest_path(step, p.end);
        NetworkPosition two = advance(net, rest, b);
        Point pa = position_coord(net, direct);
        Point pb = position_coord(net, two);
        CHECK(euclidean(pa, pb) < 1e-6);
    }
}

TEST_CASE("disconnected destinations signal") {
    RoadNetwork net;
    net.add_vertex(0, 0);
    net.add_vertex(100, 0);
    net.add_edge(0, 1, 100.0);  // one-way
    TravelTimeProvider travel(net, 1.0);
    CHECK_THROWS_AS(travel.travel_time(NetworkPosition::at_vertex(1),
                                       NetworkPosition::at_vertex(0)),
                    NetworkError);
    // largest SCC is a single vertex here
    auto mask = net.largest_scc_mask();
    CHECK((int(mask[0]) + int(mask[1])) == 1);
}

TEST_CASE("network file round trip and malformed lines") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "gp_net_test";
    fs::create_directories(dir);
    RoadNetwork net = make_grid(3, 2, 75.0);
    net.save((dir / "net.txt").string());
    RoadNetwork loaded = RoadNetwork::load((dir / "net.txt").string());
    CHECK(loaded.vertex_count() == net.vertex_count());
    CHECK(loaded.edge_count() == net.edge_count());

    std::ofstream bad((dir / "bad.txt").string());
    bad << "V 0 0 0\nV 1 10 0\nE 0 1\n";
    bad.close();
    try {
        RoadNetwork::load((dir / "bad.txt").string());
        FAIL("expected a load error");
    } catch (const NetworkError& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
}

TEST_CASE("edge shorter than euclidean distance rejected") {
    RoadNetwork net;
    net.add_vertex(0, 0);
    net.add_vertex(100, 0);
    CHECK_THROWS_AS(net.add_edge(0, 1, 50.0), NetworkError);
    CHECK_THROWS_AS(net.add_edge(0, 7, 500.0), NetworkError);
}

TEST_CASE("equirectangular projection sanity") {
    // one degree of latitude is ~111 km everywhere
    Point p = project_equirectangular(0.0, 1.0, 0.0, 0.0);
    CHECK(p.y == doctest::Approx(111194.9).epsilon(1e-3));
    CHECK(p.x == 0.0);
}
