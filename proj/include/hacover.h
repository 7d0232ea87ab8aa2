/* hacover — population-coverage evaluation and preset optimization for
 * hearing-aid gain configurations.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed through these functions; every fallible call returns a
 * hacover_status and leaves a message retrievable with hacover_last_error()
 * on failure.
 */
#ifndef HACOVER_H
#define HACOVER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hacover_status {
    HACOVER_OK = 0,
    HACOVER_ERR_PARAMETER = 1,  /* bad argument or violated precondition */
    HACOVER_ERR_VALIDATION = 2, /* malformed input data */
    HACOVER_ERR_IO = 3,         /* filesystem failure */
    HACOVER_ERR_INTERNAL = 4
} hacover_status;

typedef struct hacover_dataset hacover_dataset;
typedef struct hacover_bank hacover_bank;
typedef struct hacover_pca hacover_pca;
typedef struct hacover_grid hacover_grid;
typedef struct hacover_presets hacover_presets;
typedef struct hacover_report hacover_report;
typedef struct hacover_selection hacover_selection;

const char* hacover_version(void);

/* Message for the most recent failure on the calling thread. Valid until the
 * next failing call on the same thread. */
const char* hacover_last_error(void);

/* ---- coverage parameters ---- */

typedef struct hacover_coverage_params {
    double radius; /* Chebyshev ball radius, dB */
    double gamma;  /* likelihood-mass threshold */
} hacover_coverage_params;

void hacover_coverage_params_init(hacover_coverage_params* params);

/* ---- dataset ---- */

hacover_status hacover_dataset_load(const char* csv_path, hacover_dataset** out);
hacover_status hacover_dataset_save(const hacover_dataset* dataset, const char* csv_path);
size_t hacover_dataset_user_count(const hacover_dataset* dataset);
size_t hacover_dataset_row_count(const hacover_dataset* dataset);
void hacover_dataset_free(hacover_dataset* dataset);

typedef struct hacover_synth_spec {
    int32_t n_users;
    double bilateral_fraction;
    int32_t n_profiles;
    double profile_spread_db;
    double noise_std_db;
    double off_plane_std_db;
    double weight_concentration;
    double male_fraction;
    int32_t age_min;
    int32_t age_max;
    double ear_offset_std_db;
    uint64_t seed;
} hacover_synth_spec;

void hacover_synth_spec_init(hacover_synth_spec* spec);
hacover_status hacover_dataset_synth(const hacover_synth_spec* spec, hacover_dataset** out);

/* ---- transfer-function bank ---- */

hacover_status hacover_bank_build(double range_db, double step_db, hacover_bank** out);
size_t hacover_bank_size(const hacover_bank* bank);

/* Weights the bank from empirical deviation points (CSV with header
 * low_dev,high_dev). Passing NULL uses the bundled synthetic default model,
 * mean (0, 0) and std (5, 5) dB. scale multiplies the fitted std. */
hacover_status hacover_bank_weight(hacover_bank* bank, const char* deviations_csv, double scale);
void hacover_bank_free(hacover_bank* bank);

/* ---- PCA model ---- */

hacover_status hacover_pca_fit(const hacover_dataset* dataset, int32_t components,
                               hacover_pca** out);
hacover_status hacover_pca_load(const char* json_path, hacover_pca** out);
hacover_status hacover_pca_save(const hacover_pca* model, const char* json_path);
size_t hacover_pca_explained_variance(const hacover_pca* model, double* out, size_t capacity);
void hacover_pca_free(hacover_pca* model);

/* ---- candidate grid ---- */

typedef enum hacover_bbox_source {
    HACOVER_BBOX_PRESCRIPTIONS = 0,
    HACOVER_BBOX_VARIATIONS = 1
} hacover_bbox_source;

hacover_status hacover_grid_build(const hacover_pca* model, const hacover_dataset* dataset,
                                  const hacover_bank* bank, hacover_bbox_source source,
                                  int32_t steps_x, int32_t steps_y, hacover_grid** out);
size_t hacover_grid_size(const hacover_grid* grid);
hacover_status hacover_grid_save(const hacover_grid* grid, const char* json_path);
void hacover_grid_free(hacover_grid* grid);

/* ---- preset sets ---- */

hacover_status hacover_presets_load(const char* json_path, hacover_presets** out);
hacover_status hacover_presets_save(const hacover_presets* presets, const char* json_path);
size_t hacover_presets_size(const hacover_presets* presets);
void hacover_presets_free(hacover_presets* presets);

/* ---- coverage ---- */

hacover_status hacover_population_coverage(const hacover_dataset* dataset,
                                           const hacover_presets* presets,
                                           const hacover_bank* bank,
                                           const hacover_coverage_params* params,
                                           hacover_report** out);
double hacover_report_population_coverage(const hacover_report* report);
hacover_status hacover_report_save(const hacover_report* report, const char* json_path);
void hacover_report_free(hacover_report* report);

/* ---- preset optimization ---- */

typedef enum hacover_method {
    HACOVER_METHOD_GREEDY = 0,
    HACOVER_METHOD_GA = 1,
    HACOVER_METHOD_KMEANS = 2,
    HACOVER_METHOD_BRUTE = 3
} hacover_method;

typedef struct hacover_ga_params {
    int32_t population_size;
    int32_t iterations;
    int32_t elitism;
    double crossover_fraction;
    int32_t local_improvement; /* 0 or 1 */
} hacover_ga_params;

void hacover_ga_params_init(hacover_ga_params* params);

/* grid may be NULL for HACOVER_METHOD_KMEANS; ga may be NULL for defaults. */
hacover_status hacover_optimize(hacover_method method, const hacover_grid* grid,
                                const hacover_dataset* dataset, const hacover_bank* bank,
                                const hacover_coverage_params* params, int32_t n, uint64_t seed,
                                const hacover_ga_params* ga, hacover_selection** out);
double hacover_selection_coverage(const hacover_selection* selection);
hacover_status hacover_selection_save(const hacover_selection* selection, const char* json_path);
hacover_status hacover_selection_presets(const hacover_selection* selection, hacover_presets** out);
void hacover_selection_free(hacover_selection* selection);

/* ---- slider interface ---- */

hacover_status hacover_slider_presets(const hacover_pca* model, const hacover_dataset* dataset,
                                      const hacover_bank* bank, hacover_bbox_source source,
                                      int32_t steps_x, int32_t steps_y, hacover_presets** out);

/* ---- experiments ---- */

/* kind: "sweep", "bootstrap", "variance_scale", or "subgroup". config_path
 * and overrides (config text applied on top) may each be NULL. Result CSVs
 * and manifest.json are written into out_dir. */
hacover_status hacover_experiment_run(const char* kind, const char* config_path,
                                      const char* overrides, const char* out_dir);

/* ---- plot data ---- */

hacover_status hacover_plot_pca_scatter(const hacover_dataset* dataset, const hacover_bank* bank,
                                        const hacover_pca* model, const hacover_presets* presets,
                                        const hacover_coverage_params* params,
                                        int32_t include_variations, const char* out_csv);
hacover_status hacover_plot_coverage_vs_n(const char* sweep_csv, const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* HACOVER_H */
