#ifndef HKDYN_H
#define HKDYN_H

#include <stddef.h>

#if defined(_WIN32)
#define HK_API __declspec(dllexport)
#else
#define HK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hk_status {
    HK_OK = 0,
    HK_E_ARGUMENT,
    HK_E_CONFIGURATION,
    HK_E_INDEX,
    HK_E_SELECTION,
    HK_E_CLASSIFICATION,
    HK_E_BRANCH,
    HK_E_SCHEDULE,
    HK_E_INTEGRATOR,
    HK_E_STRATIFICATION,
    HK_E_SLIDING,
    HK_E_NOT_CONVERGED,
    HK_E_SAMPLING,
    HK_E_PARSE,
    HK_E_IO,
    HK_E_INTERNAL
} hk_status;

typedef enum hk_variant { HK_OPEN = 0, HK_CLOSED = 1 } hk_variant;

typedef enum hk_crossing {
    HK_SEPARATING = 0,
    HK_MERGING,
    HK_DEGENERATE,
    HK_MULTIPLE_PAIR,
    HK_BIDIRECTIONAL
} hk_crossing;

typedef struct hk_scenario hk_scenario;
typedef struct hk_trajectory hk_trajectory;
typedef struct hk_clusters hk_clusters;

/* Message of the last failing call on this thread ("" after success). */
HK_API const char* hk_last_error(void);
HK_API const char* hk_status_name(hk_status s);

/* ---- scenarios ---- */
HK_API size_t hk_builtin_count(void);
HK_API const char* hk_builtin_name(size_t index);
HK_API hk_status hk_scenario_builtin(const char* name, hk_scenario** out);
HK_API hk_status hk_scenario_load(const char* path, hk_scenario** out);
HK_API hk_status hk_scenario_save(const hk_scenario* sc, const char* path);
/* Constant kernel phi; weights may be NULL. */
HK_API hk_status hk_scenario_create(size_t agents, size_t dim, const double* positions, const double* weights,
                                    double phi, hk_variant variant, hk_scenario** out);
HK_API hk_status hk_scenario_toy(double x1, double x2, hk_variant variant, hk_scenario** out);
/* ic is "A".."E" (or "ic-a".."ic-e"); params = {x1, x3} or NULL for the default member. */
HK_API hk_status hk_scenario_three_agents(const char* ic, const double* params, size_t count, hk_variant variant,
                                          hk_scenario** out);
HK_API hk_status hk_scenario_square4(hk_variant variant, hk_scenario** out);
HK_API hk_status hk_scenario_distancing(int levels, const size_t* sizes, size_t count, const double* eps,
                                        size_t eps_count, int lumped, hk_scenario** out);
HK_API hk_status hk_scenario_remark71(double eps, hk_scenario** out);
HK_API hk_status hk_scenario_clss10(hk_scenario** out);
HK_API void hk_scenario_free(hk_scenario* sc);

HK_API size_t hk_scenario_agents(const hk_scenario* sc);
HK_API size_t hk_scenario_dim(const hk_scenario* sc);
HK_API hk_variant hk_scenario_variant(const hk_scenario* sc);
HK_API const char* hk_scenario_name(const hk_scenario* sc);
HK_API const char* hk_scenario_label(const hk_scenario* sc);
/* Copies agents*dim coordinates. */
HK_API hk_status hk_scenario_positions(const hk_scenario* sc, double* out);
/* Named expected quantity; HK_E_ARGUMENT when absent. */
HK_API hk_status hk_scenario_expected(const hk_scenario* sc, const char* key, double* value);

/* ---- geometry ---- */
/* Pair indices are 1-based. */
HK_API hk_status hk_classify_crossing(const hk_scenario* sc, size_t i, size_t j, hk_crossing* out);
HK_API const char* hk_crossing_name(hk_crossing c);

/* ---- solvers ---- */
/* branch: "wait=<t|inf>:<all|both|i-j,...>" tokens separated by ';' plus "others=never", "order=i-j,...". */
/* Continuous solvers sample every min(0.01, 0.003 / rate) time units, at most 1e6 samples per run. */
HK_API hk_status hk_rate_bound(const hk_scenario* sc, double* out);
HK_API hk_status hk_solve_caratheodory(const hk_scenario* sc, const char* branch, double horizon,
                                       hk_trajectory** out);
/* pins: "i-j@start:end" items separated by ';' ("end" may be inf). */
HK_API hk_status hk_solve_sliding(const hk_scenario* sc, const char* pins, double horizon, const char* branch,
                                  hk_trajectory** out);
HK_API hk_status hk_solve_clss_uniform(const hk_scenario* sc, double horizon, size_t steps, hk_trajectory** out);
/* Nodes after dense_until are kept every stride-th step. */
HK_API hk_status hk_solve_clss_jump(const hk_scenario* sc, size_t K, size_t r, double T, double extend_to,
                                    size_t stride, double dense_until, hk_trajectory** out);
/* strat: "toy1", "toy2" (two agents) or "three" (three agents on a line). */
HK_API hk_status hk_solve_stratified(const hk_scenario* sc, const char* strat, double horizon, hk_trajectory** out);
HK_API hk_status hk_check_classical(const hk_trajectory* tr, const hk_scenario* sc, double tol, int* classical,
                                    double* residual);

/* ---- trajectories ---- */
HK_API size_t hk_trajectory_size(const hk_trajectory* tr);
HK_API size_t hk_trajectory_agents(const hk_trajectory* tr);
HK_API size_t hk_trajectory_dim(const hk_trajectory* tr);
HK_API double hk_trajectory_time(const hk_trajectory* tr, size_t k);
HK_API hk_status hk_trajectory_state(const hk_trajectory* tr, size_t k, double* out);
HK_API hk_status hk_trajectory_at(const hk_trajectory* tr, double t, double* out);
HK_API size_t hk_trajectory_event_count(const hk_trajectory* tr);
/* Borrowed strings, valid until the trajectory is freed. */
HK_API hk_status hk_trajectory_event(const hk_trajectory* tr, size_t index, double* time, const char** pairs,
                                     const char** classes, const char** action);
HK_API hk_status hk_trajectory_info(const hk_trajectory* tr, const char* key, double* value);
HK_API hk_status hk_trajectory_save_csv(const hk_trajectory* tr, const char* path);
HK_API hk_status hk_trajectory_save_events(const hk_trajectory* tr, const char* path);
HK_API hk_status hk_trajectory_load_csv(const char* path, hk_trajectory** out);
HK_API hk_status hk_trajectory_load_events(hk_trajectory* tr, const char* path);
HK_API void hk_trajectory_free(hk_trajectory* tr);

/* ---- analysis ---- */
/* sc supplies kernel and variant; NULL means phi = 1 and the open variant. */
HK_API hk_status hk_barycenter_drift(const hk_trajectory* tr, double* out);
HK_API hk_status hk_hull_violation(const hk_trajectory* tr, size_t stride, double* out);
HK_API hk_status hk_lyapunov_increase(const hk_trajectory* tr, const hk_scenario* sc, double* out);
HK_API hk_status hk_peak_speed(const hk_trajectory* tr, double* out);
HK_API hk_status hk_inclusion_residual(const hk_trajectory* tr, const hk_scenario* sc, double* residual,
                                       double* worst_time);
/* Mean boundary coefficient recovered for pair i-j at the sample closest to t. */
HK_API hk_status hk_inclusion_alpha(const hk_trajectory* tr, const hk_scenario* sc, size_t i, size_t j, double t,
                                    double* alpha);
/* Terminal-speed tolerance is scaled by max(1, peak speed). */
HK_API hk_status hk_cluster_report(const hk_trajectory* tr, hk_variant variant, double cluster_tol, double sep_tol,
                                   hk_clusters** out);
HK_API size_t hk_clusters_count(const hk_clusters* c);
HK_API size_t hk_clusters_violations(const hk_clusters* c);
HK_API hk_status hk_clusters_position(const hk_clusters* c, size_t k, double* out);
/* Cluster index of every agent. */
HK_API hk_status hk_clusters_labels(const hk_clusters* c, size_t* out);
HK_API void hk_clusters_free(hk_clusters* c);
HK_API hk_status hk_compare(const hk_trajectory* a, const hk_trajectory* b, double threshold, double* max_distance,
                            double* divergence_time, double* final_distance);

/* ---- enumeration ---- */
HK_API hk_status hk_composition_count(size_t N, hk_variant variant, size_t* count);
HK_API hk_status hk_enumerate_write(size_t N, hk_variant variant, const char* path);
/* Valid zero-wait branches and whether their terminal partitions match the composition catalogue. */
HK_API hk_status hk_explore_zero_wait(size_t N, hk_variant variant, size_t* valid, int* matches);
/* Writes the simulated square catalogue; histogram[k] = distinct limit configurations with k clusters (k <= 4). */
HK_API hk_status hk_square_catalogue(hk_variant variant, double horizon, const char* path, size_t histogram[5]);

#ifdef __cplusplus
}
#endif

#endif
