// Command-line front end for the GeoPrune matching engine. Talks to the
// engine exclusively through its C API.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geoprune/geoprune.h"

namespace {

int report(gp_status status) {
    if (status != GP_OK) std::fprintf(stderr, "error: %s\n", gp_last_error());
    return static_cast<int>(status);
}

struct GenerateArgs {
    std::string grid = "20x20";
    int requests = 500;
    unsigned long long seed = 7;
    double horizon = 3600.0;
    double edge_len = 500.0;
    double wait_s = 240.0;
    double detour_ratio = 0.2;
    int eta = 1;
    std::string network_out = "network.txt";
    std::string requests_out = "requests.csv";
};

int run_generate(const GenerateArgs& args) {
    gp_synthetic_spec spec;
    gp_synthetic_spec_init(&spec);
    int w = 0, h = 0;
    if (std::sscanf(args.grid.c_str(), "%dx%d", &w, &h) != 2 || w < 2 || h < 2) {
        std::fprintf(stderr, "error: --grid expects WxH with W,H >= 2\n");
        return 2;
    }
    spec.seed = args.seed;
    spec.grid_width = w;
    spec.grid_height = h;
    spec.request_count = args.requests;
    spec.horizon_s = args.horizon;
    spec.edge_len_m = args.edge_len;
    spec.wait_s = args.wait_s;
    spec.detour_ratio = args.detour_ratio;
    spec.eta = args.eta;
    gp_status status =
        gp_generate(&spec, args.network_out.c_str(), args.requests_out.c_str());
    if (status == GP_OK) {
        std::printf("wrote %s and %s\n", args.network_out.c_str(),
                    args.requests_out.c_str());
    }
    return report(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GeoPrune ride-sharing matching engine"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a synthetic grid workload");
    generate->add_option("--grid", gen.grid, "Grid dimensions, e.g. 20x20");
    generate->add_option("--requests", gen.requests, "Number of trip requests");
    generate->add_option("--seed", gen.seed, "Random seed");
    generate->add_option("--horizon-s", gen.horizon, "Request issue-time horizon (s)");
    generate->add_option("--edge-len-m", gen.edge_len, "Grid edge length (m)");
    generate->add_option("--wait-s", gen.wait_s, "Maximum waiting time (s)");
    generate->add_option("--detour-ratio", gen.detour_ratio, "Maximum detour ratio");
    generate->add_option("--eta", gen.eta, "Passengers per request");
    generate->add_option("--network-out", gen.network_out, "Network file to write");
    generate->add_option("--requests-out", gen.requests_out, "Request CSV to write");

    auto* run = app.add_subcommand("run", "Run a simulation");
    std::string config_file, out_dir = "run_out";
    std::vector<std::pair<std::string, std::string>> overrides;
    run->add_option("--config", config_file, "key=value config file");
    run->add_option("--out", out_dir, "Output directory for run artifacts");
    std::string network, requests, pruner;
    std::string vehicles, capacity, speed, tspeed, wait, detour, slot, seed, cell;
    bool verify = false;
    run->add_option("--network", network, "Network file");
    run->add_option("--requests", requests, "Request CSV");
    run->add_option("--vehicles", vehicles, "Fleet size");
    run->add_option("--capacity", capacity, "Vehicle capacity");
    run->add_option("--speed-kmh", speed, "Vehicle speed (km/h)");
    run->add_option("--transform-speed-kmh", tspeed, "Transforming speed (km/h)");
    run->add_option("--wait-s", wait, "Default maximum waiting time (s)");
    run->add_option("--detour-ratio", detour, "Default maximum detour ratio");
    run->add_option("--slot-s", slot, "Movement time slot (s)");
    run->add_option("--seed", seed, "Random seed");
    run->add_option("--pruner", pruner, "geoprune | greedygrids | oracle");
    run->add_option("--grid-cell-m", cell, "GreedyGrids cell length (m)");
    run->add_flag("--verify-oracle", verify, "Audit pruning against the brute-force oracle");

    auto* compare = app.add_subcommand("compare", "Compare metrics across run directories");
    std::vector<std::string> run_dirs;
    std::string csv_out;
    compare->add_option("dirs", run_dirs, "Run directories")->required();
    compare->add_option("--csv-out", csv_out, "Also write the comparison as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (generate->parsed()) return run_generate(gen);

    if (run->parsed()) {
        gp_config* cfg = gp_config_new();
        gp_status status = GP_OK;
        if (!config_file.empty()) status = gp_config_load_file(cfg, config_file.c_str());
        auto set = [&](const char* key, const std::string& value) {
            if (status == GP_OK && !value.empty()) {
                status = gp_config_set(cfg, key, value.c_str());
            }
        };
        set("network", network);
        set("requests", requests);
        set("vehicles", vehicles);
        set("capacity", capacity);
        set("speed_kmh", speed);
        set("transform_speed_kmh", tspeed);
        set("wait_s", wait);
        set("detour_ratio", detour);
        set("slot_s", slot);
        set("seed", seed);
        set("pruner", pruner);
        set("grid_cell_m", cell);
        if (status == GP_OK && verify) status = gp_config_set(cfg, "verify_oracle", "1");
        char* summary = nullptr;
        if (status == GP_OK) status = gp_run(cfg, out_dir.c_str(), &summary);
        if (summary) {
            std::printf("%s\n", summary);
            gp_string_free(summary);
        }
        gp_config_free(cfg);
        return report(status);
    }

    if (compare->parsed()) {
        std::vector<const char*> dirs;
        dirs.reserve(run_dirs.size());
        for (const auto& d : run_dirs) dirs.push_back(d.c_str());
        char* table = nullptr;
        gp_status status = gp_compare(dirs.data(), static_cast<int>(dirs.size()),
                                      csv_out.empty() ? nullptr : csv_out.c_str(), &table);
        if (table) {
            std::printf("%s", table);
            gp_string_free(table);
        }
        return report(status);
    }
    return 2;
}
