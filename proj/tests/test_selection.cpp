#include <doctest.h>

#include <random>

#include "gp/baseline.hpp"
#include "gp/selection.hpp"
#include "world.hpp"

using namespace geoprune;
using namespace gptest;

namespace {

/// Exhaustive decision oracle over the whole fleet, mirroring the stated
/// tie-break order exactly.
std::optional<Assignment> brute_nonempty(const TripRequest& r, const Fleet& fleet,
                                         double now,
                                         const TravelTimeProvider& travel) {
    std::optional<Assignment> best;
    for (const Vehicle& v : fleet) {
        if (v.is_empty()) continue;
        std::size_t m = v.schedule.stop_count();
        for (std::size_t i = 1; i <= m + 1; ++i) {
            for (std::size_t j = i; j <= m + 1; ++j) {
                InsertionResult res = evaluate_insertion(v, r, i, j, now, travel);
                if (!res.valid) continue;
                Assignment a{v.id, i, j, res.increase};
                bool better = !best || a.increase < best->increase ||
                              (a.increase == best->increase &&
                               (a.vehicle < best->vehicle ||
                                (a.vehicle == best->vehicle &&
                                 (a.source_slot < best->source_slot ||
                                  (a.source_slot == best->source_slot &&
                                   a.destination_slot < best->destination_slot)))));
                if (better) best = a;
            }
        }
    }
    return best;
}

std::optional<Assignment> brute_empty(const TripRequest& r, const Fleet& fleet,
                                      const TravelTimeProvider& travel) {
    std::optional<Assignment> best;
    double best_pickup = 0.0;
    for (const Vehicle& v : fleet) {
        if (!v.is_empty() || v.capacity < r.eta) continue;
        double pickup = travel.travel_time(v.location, r.s);
        if (pickup > r.w) continue;
        if (!best || pickup < best_pickup ||
            (pickup == best_pickup && v.id < best->vehicle)) {
            best = Assignment{v.id, 1, 1, pickup + travel.travel_time(r.s, r.e)};
            best_pickup = pickup;
        }
    }
    return best;
}

bool same_assignment(const std::optional<Assignment>& a,
                     const std::optional<Assignment>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->vehicle == b->vehicle && a->source_slot == b->source_slot &&
           a->destination_slot == b->destination_slot && a->increase == b->increase;
}

}  // namespace

TEST_CASE("pipeline decision equals the fleet-wide brute force") {
    std::mt19937 rng(606);
    for (int world_seed = 0; world_seed < 4; ++world_seed) {
        World world(8, 8, 120.0, 10.0);
        populate(world, rng, 20, 50);
        for (int q = 0; q < 40; ++q) {
            TripRequest r = random_request(rng, world, 5000 + q);
            CandidateSet cand = world.state.prune(r, world.net, world.travel);
            auto nonempty = select_best_nonempty(r, cand, world.fleet, world.now,
                                                 world.travel);
            auto empty = nearest_empty_vehicle(r, world.state, world.fleet,
                                               world.net, world.travel);
            MatchDecision got = decide(r, nonempty, empty);

            auto oracle_ne = brute_nonempty(r, world.fleet, world.now, world.travel);
            auto oracle_e = brute_empty(r, world.fleet, world.travel);
            MatchDecision want = decide(r, oracle_ne, oracle_e);

            CHECK(same_assignment(nonempty, oracle_ne));
            CHECK(same_assignment(empty, oracle_e));
            CHECK(same_assignment(got.assignment, want.assignment));
        }
    }
}

TEST_CASE("nearest empty vehicle uses network distance, not euclidean") {
    // Vehicle 0 is 10 m away as the crow flies but 1000 m by road;
    // vehicle 1 is 200 m away both ways. Network distance must win.
    RoadNetwork net;
    net.add_vertex(0, 0);      // request source
    net.add_vertex(0, 10);     // behind a barrier
    net.add_vertex(200, 0);    // reachable directly
    net.add_edge(0, 1, 1000.0);
    net.add_edge(1, 0, 1000.0);
    net.add_edge(0, 2, 200.0);
    net.add_edge(2, 0, 200.0);
    TravelTimeProvider travel(net, 1.0);
    PruneState state(PruneConfig{1.0, true});
    Fleet fleet;
    for (VehicleId id = 0; id < 2; ++id) {
        Vehicle v;
        v.id = id;
        v.capacity = 4;
        v.speed = 1.0;
        v.location = NetworkPosition::at_vertex(id + 1);
        v.schedule = recompute_recorder(v.location, {}, 0, 0.0, travel);
        fleet.push_back(v);
        state.register_empty(fleet.back(), net);
    }
    TripRequest r;
    r.id = 1;
    r.t = 0.0;
    r.s = NetworkPosition::at_vertex(0);
    r.e = NetworkPosition::at_vertex(2);
    r.w = 2000.0;  // both vehicles are within the waiting budget
    r.epsilon = 0.2;
    r.derive_deadlines(travel);
    auto best = nearest_empty_vehicle(r, state, fleet, net, travel);
    REQUIRE(best.has_value());
    CHECK(best->vehicle == 1);
    CHECK(best->increase == doctest::Approx(200.0 + 200.0));
    CHECK(best->source_slot == 1);
    CHECK(best->destination_slot == 1);

    // with a tight waiting budget neither qualifies
    r.w = 100.0;
    r.derive_deadlines(travel);
    CHECK_FALSE(nearest_empty_vehicle(r, state, fleet, net, travel).has_value());
}

TEST_CASE("empty-vehicle ties break by id and capacity filters early") {
    RoadNetwork net = make_grid(3, 3, 100.0);
    TravelTimeProvider travel(net, 10.0);
    PruneState state(PruneConfig{10.0, true});
    Fleet fleet;
    auto add = [&](VehicleId id, VertexId at, int capacity) {
        Vehicle v;
        v.id = id;
        v.capacity = capacity;
        v.speed = 10.0;
        v.location = NetworkPosition::at_vertex(at);
        v.schedule = recompute_recorder(v.location, {}, 0, 0.0, travel);
        fleet.push_back(v);
        state.register_empty(fleet.back(), net);
    };
    add(0, 1, 1);  // equidistant but too small for eta = 2
    add(1, 3, 4);  // equidistant from vertex 0
    add(2, 5, 4);  // farther
    TripRequest r;
    r.id = 1;
    r.t = 0.0;
    r.s = NetworkPosition::at_vertex(0);
    r.e = NetworkPosition::at_vertex(8);
    r.w = 600.0;
    r.epsilon = 0.2;
    r.eta = 2;
    r.derive_deadlines(travel);
    auto best = nearest_empty_vehicle(r, state, fleet, net, travel);
    REQUIRE(best.has_value());
    CHECK(best->vehicle == 1);

    r.eta = 1;  // now the lower id wins the tie
    auto tied = nearest_empty_vehicle(r, state, fleet, net, travel);
    REQUIRE(tied.has_value());
    CHECK(tied->vehicle == 0);
}

TEST_CASE("decision prefers the non-empty vehicle on equal increase") {
    TripRequest r;
    r.id = 42;
    Assignment nonempty{3, 1, 2, 100.0};
    Assignment empty{7, 1, 1, 100.0};
    MatchDecision d = decide(r, nonempty, empty);
    REQUIRE(d.assignment.has_value());
    CHECK(d.assignment->vehicle == 3);
    CHECK(d.request == 42);

    MatchDecision cheaper_empty = decide(r, Assignment{3, 1, 2, 100.0},
                                         Assignment{7, 1, 1, 99.0});
    CHECK(cheaper_empty.assignment->vehicle == 7);
    MatchDecision none = decide(r, std::nullopt, std::nullopt);
    CHECK_FALSE(none.assignment.has_value());
    MatchDecision only_empty = decide(r, std::nullopt, empty);
    CHECK(only_empty.assignment->vehicle == 7);
}

TEST_CASE("candidate case flags restrict slot enumeration correctly") {
    // A candidate admitted only for append-append must not be matched at
    // interior slots even when they would be cheaper.
    RoadNetwork net = make_grid(4, 4, 100.0);
    TravelTimeProvider travel(net, 10.0);
    Vehicle v;
    v.id = 0;
    v.capacity = 4;
    v.speed = 10.0;
    v.location = NetworkPosition::at_vertex(0);
    std::vector<Stop> stops = {
        {NetworkPosition::at_vertex(15), StopKind::Pickup, 1, 1, 1e6}};
    v.schedule = recompute_recorder(v.location, stops, 0, 0.0, travel);
    REQUIRE(v.schedule.valid);
    Fleet fleet{v};

    TripRequest r;
    r.id = 2;
    r.t = 0.0;
    r.s = NetworkPosition::at_vertex(5);
    r.e = NetworkPosition::at_vertex(10);
    r.w = 1e6;
    r.epsilon = 10.0;
    r.derive_deadlines(travel);

    CandidateSet append_only;
    append_only.vehicles = {0};
    append_only.cases[0] = {false, false, true};
    auto got = select_best_nonempty(r, append_only, fleet, 0.0, travel);
    REQUIRE(got.has_value());
    CHECK(got->source_slot == 2);
    CHECK(got->destination_slot == 2);

    CandidateSet all;
    all.vehicles = {0};
    all.cases[0] = {true, true, true};
    auto free_choice = select_best_nonempty(r, all, fleet, 0.0, travel);
    REQUIRE(free_choice.has_value());
    CHECK(free_choice->increase <= got->increase);
}
