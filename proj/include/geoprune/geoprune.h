/* C interface of the GeoPrune ride-sharing matching engine.
 *
 * All functions return gp_status; on failure gp_last_error() holds a
 * message for the calling thread. Strings returned through out-params
 * are heap-allocated and must be released with gp_string_free().
 */
#ifndef GEOPRUNE_GEOPRUNE_H
#define GEOPRUNE_GEOPRUNE_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    GP_OK = 0,
    GP_ERR_RUNTIME = 1, /* invariant or audit failure */
    GP_ERR_INPUT = 2    /* bad arguments, malformed or missing input files */
} gp_status;

const char* gp_last_error(void);

void gp_string_free(char* s);

/* ---- simulation configuration (opaque) ---- */

typedef struct gp_config gp_config;

gp_config* gp_config_new(void);
void gp_config_free(gp_config* cfg);

/* Keys: network, requests, vehicles, capacity, speed_kmh,
 * transform_speed_kmh, slot_s, wait_s, detour_ratio, seed, pruner
 * (geoprune|greedygrids|oracle), verify_oracle, grid_cell_m. */
gp_status gp_config_set(gp_config* cfg, const char* key, const char* value);

/* Loads key=value lines; later gp_config_set calls override. */
gp_status gp_config_load_file(gp_config* cfg, const char* path);

/* ---- synthetic workload generation ---- */

typedef struct {
    unsigned long long seed;
    int grid_width;
    int grid_height;
    int request_count;
    double horizon_s;
    double edge_len_m;
    double wait_s;
    double detour_ratio;
    int eta;
} gp_synthetic_spec;

/* Sensible defaults for every field. */
void gp_synthetic_spec_init(gp_synthetic_spec* spec);

gp_status gp_generate(const gp_synthetic_spec* spec, const char* network_path,
                      const char* requests_path);

/* ---- simulation ---- */

/* Runs the simulation and writes manifest.json, metrics.json,
 * per_request.csv and decisions.log into out_dir. *summary (optional)
 * receives a one-line result description. Returns GP_ERR_RUNTIME when the
 * run itself reports audit failures (false negatives, deadline or capacity
 * violations); outputs are still written in that case. */
gp_status gp_run(const gp_config* cfg, const char* out_dir, char** summary);

/* ---- run comparison ---- */

/* Compares metrics of runs over identical inputs. Writes a CSV when
 * out_csv_path is non-NULL; *table_text (optional) receives a
 * human-readable table. */
gp_status gp_compare(const char* const* run_dirs, int count, const char* out_csv_path,
                     char** table_text);

#ifdef __cplusplus
}
#endif

#endif /* GEOPRUNE_GEOPRUNE_H */
