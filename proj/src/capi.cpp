#include "geoprune/geoprune.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "gp/simulator.hpp"

namespace {

thread_local std::string g_last_error;

gp_status fail(gp_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

/// Maps C++ exceptions onto the C status codes.
template <typename Fn>
gp_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(GP_ERR_INPUT, e.what());
    } catch (const geoprune::NetworkError& e) {
        return fail(GP_ERR_INPUT, e.what());
    } catch (const std::exception& e) {
        return fail(GP_ERR_RUNTIME, e.what());
    }
}

}  // namespace

struct gp_config {
    geoprune::SimulationConfig impl;
};

extern "C" {

const char* gp_last_error(void) { return g_last_error.c_str(); }

void gp_string_free(char* s) { std::free(s); }

gp_config* gp_config_new(void) { return new gp_config(); }

void gp_config_free(gp_config* cfg) { delete cfg; }

gp_status gp_config_set(gp_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(GP_ERR_INPUT, "null argument");
    return guarded([&] {
        cfg->impl.set(key, value);
        return GP_OK;
    });
}

gp_status gp_config_load_file(gp_config* cfg, const char* path) {
    if (!cfg || !path) return fail(GP_ERR_INPUT, "null argument");
    return guarded([&] {
        cfg->impl = geoprune::SimulationConfig::from_file(path);
        return GP_OK;
    });
}

void gp_synthetic_spec_init(gp_synthetic_spec* spec) {
    if (!spec) return;
    geoprune::SyntheticSpec defaults;
    spec->seed = defaults.seed;
    spec->grid_width = defaults.grid_width;
    spec->grid_height = defaults.grid_height;
    spec->request_count = defaults.request_count;
    spec->horizon_s = defaults.horizon_s;
    spec->edge_len_m = defaults.edge_len_m;
    spec->wait_s = defaults.wait_s;
    spec->detour_ratio = defaults.detour_ratio;
    spec->eta = defaults.eta;
}

gp_status gp_generate(const gp_synthetic_spec* spec, const char* network_path,
                      const char* requests_path) {
    if (!spec || !network_path || !requests_path) {
        return fail(GP_ERR_INPUT, "null argument");
    }
    return guarded([&] {
        geoprune::SyntheticSpec s;
        s.seed = spec->seed;
        s.grid_width = spec->grid_width;
        s.grid_height = spec->grid_height;
        s.request_count = spec->request_count;
        s.horizon_s = spec->horizon_s;
        s.edge_len_m = spec->edge_len_m;
        s.wait_s = spec->wait_s;
        s.detour_ratio = spec->detour_ratio;
        s.eta = spec->eta;
        geoprune::generate_synthetic(s, network_path, requests_path);
        return GP_OK;
    });
}

gp_status gp_run(const gp_config* cfg, const char* out_dir, char** summary) {
    if (!cfg || !out_dir) return fail(GP_ERR_INPUT, "null argument");
    return guarded([&] {
        geoprune::MetricsRecord metrics = geoprune::run_simulation(cfg->impl);
        geoprune::write_run_dir(cfg->impl, metrics, out_dir);
        std::ostringstream os;
        os << "requests=" << metrics.requests << " served=" << metrics.served
           << " served_ratio=" << metrics.served_ratio
           << " mean_candidates=" << metrics.mean_candidates
           << " false_negatives=" << metrics.false_negatives;
        if (summary) *summary = dup_string(os.str());
        if (metrics.false_negatives > 0 || metrics.deadline_violations > 0 ||
            metrics.capacity_violations > 0) {
            return fail(GP_ERR_RUNTIME, "audit failure: " + os.str());
        }
        return GP_OK;
    });
}

gp_status gp_compare(const char* const* run_dirs, int count, const char* out_csv_path,
                     char** table_text) {
    if (!run_dirs || count < 1) return fail(GP_ERR_INPUT, "need at least one run directory");
    return guarded([&] {
        std::vector<std::string> dirs(run_dirs, run_dirs + count);
        geoprune::ComparisonResult result = geoprune::compare_runs(dirs);
        if (out_csv_path) {
            std::ofstream out(out_csv_path);
            if (!out) return fail(GP_ERR_INPUT, std::string("cannot write ") + out_csv_path);
            out << result.csv;
        }
        if (table_text) *table_text = dup_string(result.table);
        return GP_OK;
    });
}

}  // extern "C"
