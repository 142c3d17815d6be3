#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gp/simulator.hpp"
#include "helpers.hpp"

using namespace geoprune;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
    fs::path dir = fs::temp_directory_path() / "gp_sim_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p.string(), std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

SimulationConfig small_config(const fs::path& dir, std::uint64_t seed,
                              PrunerKind pruner) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.grid_width = 10;
    spec.grid_height = 10;
    spec.request_count = 60;
    spec.horizon_s = 900.0;
    fs::path net = dir / ("net_" + std::to_string(seed) + ".txt");
    fs::path req = dir / ("req_" + std::to_string(seed) + ".csv");
    generate_synthetic(spec, net.string(), req.string());
    SimulationConfig cfg;
    cfg.network_path = net.string();
    cfg.requests_path = req.string();
    cfg.vehicles = 15;
    cfg.seed = seed;
    cfg.pruner = pruner;
    return cfg;
}

}  // namespace

TEST_CASE("zero requests terminate immediately") {
    fs::path dir = workdir();
    SyntheticSpec spec;
    spec.grid_width = 4;
    spec.grid_height = 4;
    spec.request_count = 0;
    fs::path net = dir / "empty_net.txt";
    fs::path req = dir / "empty_req.csv";
    generate_synthetic(spec, net.string(), req.string());
    SimulationConfig cfg;
    cfg.network_path = net.string();
    cfg.requests_path = req.string();
    cfg.vehicles = 3;
    MetricsRecord m = run_simulation(cfg);
    CHECK(m.requests == 0);
    CHECK(m.served == 0);
    CHECK(m.deadline_violations == 0);
    CHECK(m.rows.empty());
}

TEST_CASE("a single easy request is served and audited") {
    fs::path dir = workdir();
    RoadNetwork net = gptest::make_grid(5, 5, 500.0);
    fs::path net_path = dir / "one_net.txt";
    net.save(net_path.string());
    fs::path req_path = dir / "one_req.csv";
    {
        std::ofstream out(req_path.string());
        out << "id,t_seconds,s_vertex,e_vertex,w_seconds,epsilon,eta\n";
        out << "1,10,0,24,600,0.5,1\n";
    }
    SimulationConfig cfg;
    cfg.network_path = net_path.string();
    cfg.requests_path = req_path.string();
    cfg.vehicles = 4;
    cfg.seed = 3;
    MetricsRecord m = run_simulation(cfg);
    CHECK(m.requests == 1);
    CHECK(m.served == 1);
    CHECK(m.served_ratio == 1.0);
    CHECK(m.deadline_violations == 0);
    CHECK(m.capacity_violations == 0);
    REQUIRE(m.decision_log.size() == 1);
    CHECK(m.decision_log[0].rfind("req=1 vehicle=", 0) == 0);
    REQUIRE(m.rows.size() == 1);
    CHECK(m.rows[0].served);
}

TEST_CASE("simulation is deterministic for a fixed seed") {
    fs::path dir = workdir();
    SimulationConfig cfg = small_config(dir, 11, PrunerKind::GeoPrune);
    MetricsRecord a = run_simulation(cfg);
    MetricsRecord b = run_simulation(cfg);
    CHECK(a.served == b.served);
    CHECK(a.decision_log == b.decision_log);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].candidates == b.rows[i].candidates);
        CHECK(a.rows[i].vehicle == b.rows[i].vehicle);
        CHECK(a.rows[i].increase_s == b.rows[i].increase_s);
    }
}

TEST_CASE("decision logs match between pruned and exhaustive runs") {
    fs::path dir = workdir();
    SimulationConfig geo = small_config(dir, 12, PrunerKind::GeoPrune);
    SimulationConfig oracle = geo;
    oracle.pruner = PrunerKind::Oracle;
    MetricsRecord a = run_simulation(geo);
    MetricsRecord b = run_simulation(oracle);
    CHECK(a.decision_log == b.decision_log);
    CHECK(a.served == b.served);
}

TEST_CASE("online verification flags no false negatives") {
    fs::path dir = workdir();
    SimulationConfig cfg = small_config(dir, 13, PrunerKind::GeoPrune);
    cfg.verify_oracle = true;
    MetricsRecord m = run_simulation(cfg);
    CHECK(m.false_negatives == 0);
    CHECK(m.deadline_violations == 0);
    CHECK(m.capacity_violations == 0);
    CHECK(m.match_touch_bound_ok);
}

TEST_CASE("grid baseline serves the same requests") {
    fs::path dir = workdir();
    SimulationConfig geo = small_config(dir, 14, PrunerKind::GeoPrune);
    SimulationConfig grids = geo;
    grids.pruner = PrunerKind::GreedyGrids;
    MetricsRecord a = run_simulation(geo);
    MetricsRecord b = run_simulation(grids);
    CHECK(a.decision_log == b.decision_log);
    // the grid filter inspects at least as many candidates
    CHECK(b.mean_candidates + 1e-12 >= a.mean_candidates);
}

TEST_CASE("generator output is byte-identical across calls") {
    fs::path dir = workdir();
    SyntheticSpec spec;
    spec.seed = 99;
    spec.grid_width = 6;
    spec.grid_height = 5;
    spec.request_count = 40;
    fs::path n1 = dir / "g1.txt", r1 = dir / "g1.csv";
    fs::path n2 = dir / "g2.txt", r2 = dir / "g2.csv";
    generate_synthetic(spec, n1.string(), r1.string());
    generate_synthetic(spec, n2.string(), r2.string());
    CHECK(slurp(n1) == slurp(n2));
    CHECK(slurp(r1) == slurp(r2));

    RoadNetwork net = RoadNetwork::load(n1.string());
    CHECK(net.vertex_count() == 30);
    // 2 * (5 * (6-1) + 6 * (5-1)) directed edges
    CHECK(net.edge_count() == 2 * (5 * 5 + 6 * 4));
    TravelTimeProvider travel(net, 10.0);
    auto reqs = load_requests(r1.string(), net, travel);
    CHECK(reqs.size() == 40);
    for (std::size_t i = 1; i < reqs.size(); ++i)
        CHECK(reqs[i - 1].t <= reqs[i].t);  // issue times sorted
}

TEST_CASE("run directory artifacts and comparison") {
    fs::path dir = workdir();
    SimulationConfig geo = small_config(dir, 15, PrunerKind::GeoPrune);
    SimulationConfig oracle = geo;
    oracle.pruner = PrunerKind::Oracle;
    MetricsRecord ma = run_simulation(geo);
    MetricsRecord mb = run_simulation(oracle);
    fs::path da = dir / "run_geo", db = dir / "run_oracle";
    write_run_dir(geo, ma, da.string());
    write_run_dir(oracle, mb, db.string());
    for (const fs::path& d : {da, db}) {
        CHECK(fs::exists(d / "manifest.json"));
        CHECK(fs::exists(d / "metrics.json"));
        CHECK(fs::exists(d / "per_request.csv"));
        CHECK(fs::exists(d / "decisions.log"));
    }
    CHECK(slurp(da / "decisions.log") == slurp(db / "decisions.log"));

    ComparisonResult cmp = compare_runs({da.string(), db.string()});
    CHECK(cmp.csv.find("mean_candidates") != std::string::npos);
    CHECK(cmp.table.find(pruner_name(PrunerKind::Oracle)) != std::string::npos);

    // comparison refuses runs over different inputs
    SimulationConfig other = small_config(dir, 16, PrunerKind::GeoPrune);
    MetricsRecord mo = run_simulation(other);
    fs::path dc = dir / "run_other";
    write_run_dir(other, mo, dc.string());
    CHECK_THROWS(compare_runs({da.string(), dc.string()}));
}

TEST_CASE("config file parsing") {
    fs::path dir = workdir();
    fs::path cfg_path = dir / "sim.cfg";
    {
        std::ofstream out(cfg_path.string());
        out << "# comment\n";
        out << "vehicles = 77\n";
        out << "pruner = greedygrids\n";
        out << "speed_kmh = 30\n";
        out << "verify_oracle = true\n";
    }
    SimulationConfig cfg = SimulationConfig::from_file(cfg_path.string());
    CHECK(cfg.vehicles == 77);
    CHECK(cfg.pruner == PrunerKind::GreedyGrids);
    CHECK(cfg.speed_kmh == 30.0);
    CHECK(cfg.verify_oracle);
    CHECK_THROWS(cfg.set("no_such_key", "1"));
    CHECK_THROWS(pruner_from_name("bogus"));
    CHECK(pruner_from_name(pruner_name(PrunerKind::Oracle)) == PrunerKind::Oracle);
}
