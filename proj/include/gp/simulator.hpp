#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gp/baseline.hpp"
#include "gp/prune.hpp"
#include "gp/selection.hpp"

namespace geoprune {

enum class PrunerKind { GeoPrune, GreedyGrids, Oracle };

std::string pruner_name(PrunerKind kind);
PrunerKind pruner_from_name(const std::string& name);

struct SimulationConfig {
    std::string network_path;
    std::string requests_path;
    int vehicles = 50;
    int capacity = 4;
    double speed_kmh = 48.0;
    double transform_speed_kmh = 48.0;
    double slot_s = 1.0;
    double wait_s = 240.0;       // generation default
    double detour_ratio = 0.2;   // generation default
    std::uint64_t seed = 1;
    PrunerKind pruner = PrunerKind::GeoPrune;
    bool verify_oracle = false;
    double grid_cell_m = 1000.0;  // GreedyGrids cell length

    /// key=value config file; unknown keys rejected.
    static SimulationConfig from_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::map<std::string, std::string> echo() const;
};

struct PerRequestRow {
    RequestId id = 0;
    std::size_t candidates = 0;  // remaining non-empty vehicles after pruning
    double prune_us = 0.0;
    double select_us = 0.0;
    std::uint64_t prune_ops = 0;  // index nodes visited + entries inspected
    bool served = false;
    VehicleId vehicle = -1;
    double increase_s = 0.0;
};

struct MetricsRecord {
    std::size_t requests = 0;
    std::size_t served = 0;
    double served_ratio = 0.0;
    double mean_candidates = 0.0;
    double p95_candidates = 0.0;
    double mean_prune_ops = 0.0;
    double total_prune_us = 0.0;
    double total_select_us = 0.0;
    double total_move_update_us = 0.0;
    std::size_t false_negatives = 0;    // only populated with verify_oracle
    std::size_t deadline_violations = 0;
    std::size_t capacity_violations = 0;
    std::size_t max_match_index_touched = 0;
    bool match_touch_bound_ok = true;  // every match touched <= 2*(m+1) entries

    std::vector<PerRequestRow> rows;
    std::vector<std::string> decision_log;
};

/// Replays the request stream over a moving fleet: prune -> select ->
/// commit, with per-slot movement on shortest paths. Deterministic given
/// the seed.
MetricsRecord run_simulation(const SimulationConfig& config);

/// Grid road network (unit edges of `edge_len_m`) plus a uniform request
/// stream. Byte-identical for identical arguments.
struct SyntheticSpec {
    std::uint64_t seed = 7;
    int grid_width = 20;
    int grid_height = 20;
    int request_count = 500;
    double horizon_s = 3600.0;
    double edge_len_m = 500.0;
    double wait_s = 240.0;
    double detour_ratio = 0.2;
    int eta = 1;
};
void generate_synthetic(const SyntheticSpec& spec, const std::string& network_path,
                        const std::string& requests_path);

/// Writes manifest.json, metrics.json, per_request.csv, decisions.log.
void write_run_dir(const SimulationConfig& config, const MetricsRecord& metrics,
                   const std::string& out_dir);

struct ComparisonResult {
    std::string csv;
    std::string table;
};
/// Side-by-side metric comparison of runs over identical inputs; throws on
/// mismatched manifests.
ComparisonResult compare_runs(const std::vector<std::string>& run_dirs);

std::string file_hash_hex(const std::string& path);

}  // namespace geoprune
