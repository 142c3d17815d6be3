#include "gp/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace geoprune {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {
constexpr const char* kArtifactVersion = "0.1.0";
constexpr double kReachEps = 1e-9;     // meters
constexpr double kAuditEps = 1e-6;     // seconds

double now_us(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
        .count();
}
}  // namespace

std::string pruner_name(PrunerKind kind) {
    switch (kind) {
        case PrunerKind::GeoPrune: return "geoprune";
        case PrunerKind::GreedyGrids: return "greedygrids";
        case PrunerKind::Oracle: return "oracle";
    }
    return "?";
}

PrunerKind pruner_from_name(const std::string& name) {
    if (name == "geoprune") return PrunerKind::GeoPrune;
    if (name == "greedygrids") return PrunerKind::GreedyGrids;
    if (name == "oracle") return PrunerKind::Oracle;
    throw std::invalid_argument("unknown pruner: " + name);
}

void SimulationConfig::set(const std::string& key, const std::string& value) {
    try {
        if (key == "network") network_path = value;
        else if (key == "requests") requests_path = value;
        else if (key == "vehicles") vehicles = std::stoi(value);
        else if (key == "capacity") capacity = std::stoi(value);
        else if (key == "speed_kmh") speed_kmh = std::stod(value);
        else if (key == "transform_speed_kmh") transform_speed_kmh = std::stod(value);
        else if (key == "slot_s") slot_s = std::stod(value);
        else if (key == "wait_s") wait_s = std::stod(value);
        else if (key == "detour_ratio") detour_ratio = std::stod(value);
        else if (key == "seed") seed = std::stoull(value);
        else if (key == "pruner") pruner = pruner_from_name(value);
        else if (key == "verify_oracle") verify_oracle = value == "1" || value == "true";
        else if (key == "grid_cell_m") grid_cell_m = std::stod(value);
        else throw std::invalid_argument("unknown config key: " + key);
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("config value out of range for " + key);
    }
}

SimulationConfig SimulationConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    SimulationConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        }
        auto trim = [](std::string s) {
            const char* ws = " \t\r";
            s.erase(0, s.find_first_not_of(ws));
            s.erase(s.find_last_not_of(ws) + 1);
            return s;
        };
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::map<std::string, std::string> SimulationConfig::echo() const {
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(12);
        os << v;
        return os.str();
    };
    return {{"network", network_path},
            {"requests", requests_path},
            {"vehicles", std::to_string(vehicles)},
            {"capacity", std::to_string(capacity)},
            {"speed_kmh", fmt(speed_kmh)},
            {"transform_speed_kmh", fmt(transform_speed_kmh)},
            {"slot_s", fmt(slot_s)},
            {"wait_s", fmt(wait_s)},
            {"detour_ratio", fmt(detour_ratio)},
            {"seed", std::to_string(seed)},
            {"pruner", pruner_name(pruner)},
            {"verify_oracle", verify_oracle ? "1" : "0"},
            {"grid_cell_m", fmt(grid_cell_m)}};
}

void generate_synthetic(const SyntheticSpec& spec, const std::string& network_path,
                        const std::string& requests_path) {
    if (spec.grid_width < 2 || spec.grid_height < 2) {
        throw std::invalid_argument("grid dimensions must be at least 2x2");
    }
    if (spec.request_count < 0 || spec.horizon_s <= 0.0 || spec.edge_len_m <= 0.0) {
        throw std::invalid_argument("invalid synthetic workload parameters");
    }
    const int w = spec.grid_width;
    const int h = spec.grid_height;
    std::ofstream net_out(network_path);
    if (!net_out) throw std::invalid_argument("cannot write " + network_path);
    net_out.precision(10);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            net_out << "V " << (y * w + x) << ' ' << x * spec.edge_len_m << ' '
                    << y * spec.edge_len_m << '\n';
        }
    }
    auto emit = [&](int a, int b) {
        net_out << "E " << a << ' ' << b << ' ' << spec.edge_len_m << '\n';
        net_out << "E " << b << ' ' << a << ' ' << spec.edge_len_m << '\n';
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) emit(y * w + x, y * w + x + 1);
            if (y + 1 < h) emit(y * w + x, (y + 1) * w + x);
        }
    }
    net_out.close();

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> time_dist(0.0, spec.horizon_s);
    std::uniform_int_distribution<int> vertex_dist(0, w * h - 1);
    struct Req {
        double t;
        int s, e;
    };
    std::vector<Req> reqs(static_cast<std::size_t>(spec.request_count));
    for (auto& r : reqs) {
        r.t = time_dist(rng);
        r.s = vertex_dist(rng);
        do {
            r.e = vertex_dist(rng);
        } while (r.e == r.s);
    }
    std::sort(reqs.begin(), reqs.end(), [](const Req& a, const Req& b) {
        return a.t != b.t ? a.t < b.t : a.s < b.s;
    });
    std::ofstream req_out(requests_path);
    if (!req_out) throw std::invalid_argument("cannot write " + requests_path);
    req_out << "id,t_seconds,s_vertex,e_vertex,w_seconds,epsilon,eta\n";
    req_out.precision(10);
    req_out << std::fixed;
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        req_out << i << ',' << reqs[i].t << ',' << reqs[i].s << ',' << reqs[i].e << ','
                << spec.wait_s << ',' << spec.detour_ratio << ',' << spec.eta << '\n';
    }
}

namespace {

struct VehicleRuntime {
    Path path;
    double traveled = 0.0;
};

struct RequestAudit {
    double lp = 0.0;
    double ld = 0.0;
    double pickup = -1.0;
    double dropoff = -1.0;
};

void pop_front_stop(TripSchedule& s) {
    s.stops.erase(s.stops.begin());
    s.arr.erase(s.arr.begin());
    s.ddl.erase(s.ddl.begin());
    s.slk.erase(s.slk.begin());
    s.occupancy.erase(s.occupancy.begin());
}

std::string format_decision(const MatchDecision& d) {
    std::ostringstream os;
    os << "req=" << d.request;
    if (d.assignment) {
        os.precision(9);
        os << std::fixed << " vehicle=" << d.assignment->vehicle << " i="
           << d.assignment->source_slot << " j=" << d.assignment->destination_slot
           << " increase=" << d.assignment->increase;
    } else {
        os << " rejected";
    }
    return os.str();
}

}  // namespace

MetricsRecord run_simulation(const SimulationConfig& cfg) {
    if (cfg.slot_s <= 0.0) throw std::invalid_argument("slot_s must be positive");
    if (cfg.vehicles < 1) throw std::invalid_argument("need at least one vehicle");
    RoadNetwork net = RoadNetwork::load(cfg.network_path);
    const double speed = cfg.speed_kmh / 3.6;
    const double vt = cfg.transform_speed_kmh / 3.6;
    if (vt + 1e-12 < speed) {
        std::cerr << "warning: transforming speed below vehicle speed; "
                     "pruning may drop feasible vehicles\n";
    }
    TravelTimeProvider travel(net, speed);
    std::vector<TripRequest> requests = load_requests(cfg.requests_path, net, travel);
    std::sort(requests.begin(), requests.end(), [](const TripRequest& a, const TripRequest& b) {
        return a.t != b.t ? a.t < b.t : a.id < b.id;
    });

    std::vector<char> scc = net.largest_scc_mask();
    std::vector<VertexId> scc_vertices;
    for (VertexId v = 0; v < static_cast<VertexId>(net.vertex_count()); ++v) {
        if (scc[v]) scc_vertices.push_back(v);
    }
    if (scc_vertices.empty()) throw std::invalid_argument("network has no vertices");

    PruneState state(PruneConfig{vt, true});
    GridIndex grid(cfg.grid_cell_m);
    Fleet fleet(static_cast<std::size_t>(cfg.vehicles));
    std::vector<VehicleRuntime> runtime(fleet.size());
    std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    std::uniform_int_distribution<std::size_t> place(0, scc_vertices.size() - 1);
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        Vehicle& v = fleet[i];
        v.id = static_cast<VehicleId>(i);
        v.location = NetworkPosition::at_vertex(scc_vertices[place(rng)]);
        v.capacity = cfg.capacity;
        v.speed = speed;
        state.register_empty(v, net);
        grid.track(v.id, position_coord(net, v.location));
    }

    MetricsRecord metrics;
    std::unordered_map<RequestId, RequestAudit> audits;

    auto advance_vehicle = [&](Vehicle& v, VehicleRuntime& rt, double t_from, double t_to) {
        if (v.is_empty()) return;
        double budget = (t_to - t_from) * v.speed;  // meters
        double local = t_from;
        std::size_t reached = 0;
        bool finished = false;
        while (!v.schedule.empty()) {
            double need = rt.path.length - rt.traveled;
            if (need > budget + kReachEps) {
                rt.traveled += budget;
                v.location = advance(net, rt.path, rt.traveled);
                break;
            }
            need = std::max(need, 0.0);
            budget -= need;
            local += need / v.speed;
            const Stop stop = v.schedule.stops.front();
            v.location = stop.location;
            RequestAudit& audit = audits.at(stop.request);
            if (stop.kind == StopKind::Pickup) {
                audit.pickup = local;
                v.onboard += stop.eta;
            } else {
                audit.dropoff = local;
                v.onboard -= stop.eta;
            }
            if (v.onboard > v.capacity || v.onboard < 0) ++metrics.capacity_violations;
            pop_front_stop(v.schedule);
            v.schedule.initial_onboard = v.onboard;
            ++reached;
            if (v.schedule.empty()) {
                finished = true;  // empty vehicles stay at the drop-off
                break;
            }
            rt.path = travel.shortest_path(v.location, v.schedule.stops.front().location);
            rt.traveled = 0.0;
        }
        if (reached > 0) {
            state.move_update(v, reached, finished, net);
        }
    };

    auto advance_all = [&](double t_from, double t_to) {
        auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            advance_vehicle(fleet[i], runtime[i], t_from, t_to);
            grid.track(fleet[i].id, position_coord(net, fleet[i].location));
        }
        metrics.total_move_update_us += now_us(t0);
    };

    auto prune_op_count = [&]() {
        return state.seg_index().nodes_visited() + state.seg_index().entries_reported() +
               state.end_index().nodes_visited() + state.end_index().entries_reported();
    };

    auto handle_request = [&](const TripRequest& r, double now) {
        PerRequestRow row;
        row.id = r.id;
        const std::uint64_t ops_before = prune_op_count();
        auto t0 = std::chrono::steady_clock::now();
        CandidateSet cand;
        switch (cfg.pruner) {
            case PrunerKind::GeoPrune:
                cand = state.prune(r, net, travel);
                break;
            case PrunerKind::Oracle:
                for (const Vehicle& v : fleet) {
                    if (v.is_empty()) continue;
                    cand.cases[v.id] = {true, true, true};
                    cand.vehicles.push_back(v.id);
                }
                std::sort(cand.vehicles.begin(), cand.vehicles.end());
                break;
            case PrunerKind::GreedyGrids:
                for (VehicleId id : grid.candidates(r, net, vt)) {
                    if (fleet[static_cast<std::size_t>(id)].is_empty()) continue;
                    cand.cases[id] = {true, true, true};
                    cand.vehicles.push_back(id);
                }
                break;
        }
        row.prune_us = now_us(t0);
        row.prune_ops = prune_op_count() - ops_before;
        row.candidates = cand.vehicles.size();

        if (cfg.verify_oracle) {
            for (VehicleId v : oracle_feasible_set(r, fleet, now, travel, true)) {
                if (!std::binary_search(cand.vehicles.begin(), cand.vehicles.end(), v)) {
                    ++metrics.false_negatives;
                }
            }
        }

        auto t1 = std::chrono::steady_clock::now();
        std::optional<Assignment> best_nonempty =
            select_best_nonempty(r, cand, fleet, now, travel);
        std::optional<Assignment> best_empty =
            nearest_empty_vehicle(r, state, fleet, net, travel);
        MatchDecision decision = decide(r, best_nonempty, best_empty);
        row.select_us = now_us(t1);

        if (decision.assignment) {
            const Assignment& a = *decision.assignment;
            Vehicle& v = fleet[static_cast<std::size_t>(a.vehicle)];
            std::vector<Stop> stops =
                stops_with_insertion(v.schedule, r, a.source_slot, a.destination_slot);
            TripSchedule rebuilt =
                recompute_recorder(v.location, std::move(stops), v.onboard, now, travel);
            if (!rebuilt.valid) {
                throw std::logic_error("invariant violation: committed schedule is invalid");
            }
            for (std::size_t k = 1; k <= rebuilt.stop_count(); ++k) {
                if (rebuilt.occupancy[k] > v.capacity) {
                    throw std::logic_error("invariant violation: capacity exceeded on commit");
                }
            }
            v.schedule = std::move(rebuilt);
            std::size_t touched = state.match_update(v, net);
            metrics.max_match_index_touched =
                std::max(metrics.max_match_index_touched, touched);
            if (touched > 2 * (v.schedule.stop_count() + 1)) {
                metrics.match_touch_bound_ok = false;
            }
            auto& rt = runtime[static_cast<std::size_t>(a.vehicle)];
            rt.path = travel.shortest_path(v.location, v.schedule.stops.front().location);
            rt.traveled = 0.0;
            audits[r.id] = RequestAudit{r.lp, r.ld};
            row.served = true;
            row.vehicle = a.vehicle;
            row.increase_s = a.increase;
            ++metrics.served;
            // Flush zero-length legs (stop already at the vehicle position).
            advance_vehicle(v, rt, now, now);
            grid.track(v.id, position_coord(net, v.location));
        }
        metrics.decision_log.push_back(format_decision(decision));
        metrics.rows.push_back(row);
        ++metrics.requests;
    };

    double now = 0.0;
    double next_tick = cfg.slot_s;
    std::size_t next_req = 0;
    auto all_idle = [&]() {
        return std::all_of(fleet.begin(), fleet.end(),
                           [](const Vehicle& v) { return v.is_empty(); });
    };
    const double time_cap =
        (requests.empty() ? 0.0 : requests.back().t) + 7.0 * 86400.0;
    while (next_req < requests.size() || !all_idle()) {
        double target;
        bool is_request = false;
        if (next_req < requests.size() && requests[next_req].t <= next_tick) {
            target = requests[next_req].t;
            is_request = true;
        } else {
            target = next_tick;
        }
        if (target > now) advance_all(now, target);
        now = target;
        if (is_request) {
            handle_request(requests[next_req], now);
            ++next_req;
        } else {
            next_tick += cfg.slot_s;
        }
        if (now > time_cap) {
            throw std::runtime_error("simulation failed to quiesce");
        }
    }

    // Replay audit: deadlines of every served request.
    for (const auto& [id, audit] : audits) {
        if (audit.pickup < 0.0 || audit.dropoff < 0.0) {
            ++metrics.deadline_violations;  // served but never completed
            continue;
        }
        if (audit.pickup > audit.lp + kAuditEps) ++metrics.deadline_violations;
        if (audit.dropoff > audit.ld + kAuditEps) ++metrics.deadline_violations;
    }

    metrics.served_ratio =
        metrics.requests == 0 ? 0.0
                              : static_cast<double>(metrics.served) / metrics.requests;
    if (!metrics.rows.empty()) {
        std::vector<std::size_t> counts;
        counts.reserve(metrics.rows.size());
        double sum = 0.0, ops = 0.0;
        for (const auto& row : metrics.rows) {
            counts.push_back(row.candidates);
            sum += static_cast<double>(row.candidates);
            ops += static_cast<double>(row.prune_ops);
            metrics.total_prune_us += row.prune_us;
            metrics.total_select_us += row.select_us;
        }
        std::sort(counts.begin(), counts.end());
        metrics.mean_candidates = sum / counts.size();
        metrics.mean_prune_ops = ops / counts.size();
        std::size_t p95_idx = std::min(counts.size() - 1, (counts.size() * 95) / 100);
        metrics.p95_candidates = static_cast<double>(counts[p95_idx]);
    }
    return metrics;
}

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot hash missing file: " + path);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void write_run_dir(const SimulationConfig& config, const MetricsRecord& metrics,
                   const std::string& out_dir) {
    fs::create_directories(out_dir);
    json manifest;
    manifest["artifact_version"] = kArtifactVersion;
    manifest["seed"] = config.seed;
    manifest["config"] = config.echo();
    manifest["network_hash"] = file_hash_hex(config.network_path);
    manifest["requests_hash"] = file_hash_hex(config.requests_path);
    manifest["outputs"] = {"metrics.json", "per_request.csv", "decisions.log"};
    std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << '\n';

    json m;
    m["requests"] = metrics.requests;
    m["served"] = metrics.served;
    m["served_ratio"] = metrics.served_ratio;
    m["mean_candidates"] = metrics.mean_candidates;
    m["p95_candidates"] = metrics.p95_candidates;
    m["mean_prune_ops"] = metrics.mean_prune_ops;
    m["total_prune_us"] = metrics.total_prune_us;
    m["total_select_us"] = metrics.total_select_us;
    m["total_match_us"] = metrics.total_prune_us + metrics.total_select_us;
    m["total_move_update_us"] = metrics.total_move_update_us;
    m["false_negatives"] = metrics.false_negatives;
    m["deadline_violations"] = metrics.deadline_violations;
    m["capacity_violations"] = metrics.capacity_violations;
    m["max_match_index_touched"] = metrics.max_match_index_touched;
    m["match_touch_bound_ok"] = metrics.match_touch_bound_ok;
    std::ofstream(fs::path(out_dir) / "metrics.json") << m.dump(2) << '\n';

    std::ofstream csv(fs::path(out_dir) / "per_request.csv");
    csv << "request_id,candidates,prune_us,select_us,outcome,vehicle,increase_s\n";
    csv.precision(9);
    csv << std::fixed;
    for (const auto& row : metrics.rows) {
        csv << row.id << ',' << row.candidates << ',' << row.prune_us << ','
            << row.select_us << ',' << (row.served ? "assigned" : "rejected") << ','
            << row.vehicle << ',' << row.increase_s << '\n';
    }

    std::ofstream log(fs::path(out_dir) / "decisions.log");
    for (const auto& line : metrics.decision_log) log << line << '\n';
}

ComparisonResult compare_runs(const std::vector<std::string>& run_dirs) {
    if (run_dirs.empty()) throw std::invalid_argument("no run directories given");
    struct Loaded {
        std::string dir;
        json manifest;
        json metrics;
    };
    std::vector<Loaded> runs;
    for (const auto& dir : run_dirs) {
        Loaded l;
        l.dir = dir;
        std::ifstream mf(fs::path(dir) / "manifest.json");
        std::ifstream mt(fs::path(dir) / "metrics.json");
        if (!mf || !mt) throw std::invalid_argument("missing run files in " + dir);
        mf >> l.manifest;
        mt >> l.metrics;
        runs.push_back(std::move(l));
    }
    for (const auto& key :
         {"network_hash", "requests_hash", "seed"}) {
        for (std::size_t i = 1; i < runs.size(); ++i) {
            if (runs[i].manifest.at(key) != runs[0].manifest.at(key)) {
                throw std::invalid_argument(std::string("run inputs differ on ") + key);
            }
        }
    }
    for (const auto& key : {"vehicles", "capacity", "speed_kmh", "slot_s"}) {
        for (std::size_t i = 1; i < runs.size(); ++i) {
            if (runs[i].manifest.at("config").at(key) !=
                runs[0].manifest.at("config").at(key)) {
                throw std::invalid_argument(std::string("run configs differ on ") + key);
            }
        }
    }

    const double base = runs[0].metrics.at("mean_candidates").get<double>();
    std::ostringstream csv, table;
    csv << "run,pruner,mean_candidates,p95_candidates,total_match_us,"
           "total_move_update_us,served_ratio,candidate_factor_vs_first\n";
    table << "run                 pruner       mean_cand   p95_cand   match_us      "
             "update_us     served  factor\n";
    csv.precision(6);
    csv << std::fixed;
    for (const auto& run : runs) {
        double mean = run.metrics.at("mean_candidates").get<double>();
        double factor = mean > 0.0 ? base == 0.0 ? 0.0 : mean / base : 0.0;
        std::string pruner = run.manifest.at("config").at("pruner").get<std::string>();
        csv << run.dir << ',' << pruner << ',' << mean << ','
            << run.metrics.at("p95_candidates").get<double>() << ','
            << run.metrics.at("total_match_us").get<double>() << ','
            << run.metrics.at("total_move_update_us").get<double>() << ','
            << run.metrics.at("served_ratio").get<double>() << ',' << factor << '\n';
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%-19s %-12s %-11.3f %-10.1f %-13.0f %-13.0f %-7.4f %.3f\n",
                      run.dir.substr(0, 19).c_str(), pruner.c_str(), mean,
                      run.metrics.at("p95_candidates").get<double>(),
                      run.metrics.at("total_match_us").get<double>(),
                      run.metrics.at("total_move_update_us").get<double>(),
                      run.metrics.at("served_ratio").get<double>(), factor);
        table << buf;
    }
    return {csv.str(), table.str()};
}

}  // namespace geoprune
