#ifndef GROWTH_FRICTIONS_H
#define GROWTH_FRICTIONS_H

/*
 * C interface to the growth-optimal trading library.
 *
 * Every function returns a gf_status. On failure a thread-local message is
 * available from gf_last_error() until the next call on the same thread.
 * Handles are opaque and must be released with their matching destroy call;
 * destroy functions accept NULL.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(GF_BUILDING_LIBRARY)
#define GF_API __attribute__((visibility("default")))
#else
#define GF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gf_status {
    GF_OK = 0,
    GF_INVALID_ARGUMENT = 1,
    GF_PARAMETER_DEGENERACY = 2,
    GF_NON_CONVERGENCE = 3,
    GF_NUMERICAL = 4,
    GF_IO = 5,
    GF_INTERNAL = 6
} gf_status;

GF_API const char* gf_last_error(void);
GF_API const char* gf_status_name(gf_status status);

/* ---- model ---- */

typedef struct gf_model gf_model;

/* delta and gamma may be 0 here; each entry point enforces its own requirements. */
GF_API gf_status gf_model_create(double r, double mu, double sigma, double delta, double gamma,
                                 gf_model** out);
GF_API void gf_model_destroy(gf_model* model);
GF_API gf_status gf_merton_fraction(const gf_model* model, double* out);
GF_API gf_status gf_growth_integrand(const gf_model* model, double h, double* out);
GF_API gf_status gf_to_centered(double h, double* out);
GF_API gf_status gf_from_centered(double y, double* out);
GF_API gf_status gf_wealth_factor(const gf_model* model, double h, double xi, double* out);
GF_API gf_status gf_trade_cost_gamma(const gf_model* model, double x, double y, double* out);

/* ---- fixed-plus-proportional boundaries ---- */

typedef struct gf_candidate {
    double l;
    double x0;
    double a;
    double alpha;
    double beta;
    double b;
} gf_candidate;

typedef struct gf_solution_info {
    gf_candidate candidate;
    double residual_norm;
    int newton_iters;
    int original_cost_optimal;
} gf_solution_info;

typedef struct gf_verification {
    size_t grid_n;
    double tol;
    double max_interior_residual;
    double worst_interior_x;
    double max_exterior_excess;
    double worst_exterior_x;
    double max_intervention_excess;
    double worst_intervention_x;
    double boundary_equality_gap;
    double target_at_lower;
    double target_at_upper;
    double pasting_mismatch;
    double strict_margin;
    int passed;
    size_t failure_count;
} gf_verification;

typedef struct gf_solution gf_solution;

/* init may be NULL for the continuation start. */
GF_API gf_status gf_solve_boundaries(const gf_model* model, const gf_candidate* init,
                                     gf_solution** out);
/* Wraps an externally supplied candidate (e.g. read from a file) without solving. */
GF_API gf_status gf_solution_from_candidate(const gf_model* model, const gf_candidate* cand,
                                            gf_solution** out);
GF_API void gf_solution_destroy(gf_solution* sol);
GF_API gf_status gf_solution_info_get(const gf_solution* sol, gf_solution_info* out);
GF_API gf_status gf_solution_trace_size(const gf_solution* sol, size_t* out);
GF_API gf_status gf_solution_trace_at(const gf_solution* sol, size_t index, double* delta,
                                      gf_candidate* cand);
GF_API gf_status gf_residual_system(const gf_model* model, const gf_candidate* cand,
                                    double out[6]);
GF_API gf_status gf_value_function(const gf_solution* sol, double x, double* u, double* du,
                                   double* ddu);
/* claimed_l may be NULL; otherwise the interior test uses that growth excess. */
GF_API gf_status gf_verify_qvi(const gf_solution* sol, size_t grid_n, double tol,
                               const double* claimed_l, gf_verification* out);
/* Writes the i-th failure text of the last verification on this solution. */
GF_API gf_status gf_verification_failure(const gf_solution* sol, size_t index, const char** text);
GF_API gf_status gf_multi_start_boundaries(const gf_model* model, int count, uint64_t seed,
                                           gf_candidate* out, double* max_spread);

/* ---- pure-proportional limit ---- */

typedef struct gf_limit_candidate {
    double l0;
    double x0;
    double A;
    double B;
} gf_limit_candidate;

typedef struct gf_limit_info {
    gf_limit_candidate candidate;
    double residual_norm;
    int newton_iters;
    double c2_mismatch;
} gf_limit_info;

typedef struct gf_limit gf_limit;

/* Uses the model's gamma; the model's delta is ignored. */
GF_API gf_status gf_solve_limit(const gf_model* model, gf_limit** out);
GF_API gf_status gf_limit_from_candidate(const gf_model* model, const gf_limit_candidate* cand,
                                         gf_limit** out);
GF_API void gf_limit_destroy(gf_limit* lim);
GF_API gf_status gf_limit_info_get(const gf_limit* lim, gf_limit_info* out);
GF_API gf_status gf_residual_system_limit(const gf_model* model, const gf_limit_candidate* cand,
                                          double out[4]);
GF_API gf_status gf_verify_hjb_limit(const gf_limit* lim, size_t grid_n, double tol,
                                     const double* claimed_l0, gf_verification* out);
GF_API gf_status gf_limit_verification_failure(const gf_limit* lim, size_t index,
                                               const char** text);
GF_API gf_status gf_multi_start_limit(const gf_model* model, int count, uint64_t seed,
                                      gf_limit_candidate* out, double* max_spread);

/* ---- simulation ---- */

typedef struct gf_sim_config {
    double horizon;
    double dt;
    double v0;
    int has_h0;
    double h0;
    uint64_t n_paths;
    uint64_t base_seed;
    int bridge_correction;
    unsigned substeps;
    size_t record_stride;
} gf_sim_config;

typedef struct gf_growth_estimate {
    double mean;
    double std_error;
    uint64_t n_paths;
    double horizon;
    double dt;
    double compensated_mean;
    double compensated_std_error;
    double trade_rate;
    double buy_rate;
    double sell_rate;
} gf_growth_estimate;

typedef enum gf_event {
    GF_EVENT_NONE = 0,
    GF_EVENT_TRADE_LO = 1,
    GF_EVENT_TRADE_HI = 2,
    GF_EVENT_REFLECT_LO = 3,
    GF_EVENT_REFLECT_HI = 4
} gf_event;

typedef struct gf_path_sample {
    double t;
    double h;
    double wealth;
    gf_event event;
} gf_path_sample;

typedef struct gf_path gf_path;

/* Defaults: T = 200, dt = 1e-3, v0 = 1, 1000 paths, seed 0, substeps 1. */
GF_API void gf_sim_config_default(gf_sim_config* cfg);
GF_API const char* gf_event_name(gf_event event);

GF_API gf_status gf_estimate_growth_impulse(const gf_model* model, const gf_candidate* cand,
                                            const gf_sim_config* cfg, gf_growth_estimate* out);
GF_API gf_status gf_estimate_growth_reflected(const gf_model* model, double A, double B,
                                              const gf_sim_config* cfg, gf_growth_estimate* out);
GF_API gf_status gf_simulate_impulse_path(const gf_model* model, const gf_candidate* cand,
                                          const gf_sim_config* cfg, uint64_t path_index,
                                          gf_path** out);
GF_API gf_status gf_simulate_reflected_path(const gf_model* model, double A, double B,
                                            const gf_sim_config* cfg, uint64_t path_index,
                                            gf_path** out);
GF_API void gf_path_destroy(gf_path* path);
GF_API gf_status gf_path_size(const gf_path* path, size_t* out);
GF_API gf_status gf_path_sample_at(const gf_path* path, size_t index, gf_path_sample* out);
/* Terminal log-wealth growth (log V_T - log v0) / T and the number of events. */
GF_API gf_status gf_path_summary(const gf_path* path, double* growth, size_t* events);

typedef struct gf_coupling_row {
    double delta;
    double lo_exit;
    double lo_target;
    double hi_target;
    double hi_exit;
    double mean_sup_distance;
    double std_error;
    double min_jump;
    double mean_trades;
} gf_coupling_row;

typedef struct gf_coupling gf_coupling;

/* Uses the model's gamma; deltas must be strictly decreasing. */
GF_API gf_status gf_couple_paths(const gf_model* model, const double* deltas, size_t n_deltas,
                                 const gf_sim_config* cfg, gf_coupling** out);
GF_API void gf_coupling_destroy(gf_coupling* c);
GF_API gf_status gf_coupling_limits(const gf_coupling* c, double* reflect_lo, double* reflect_hi,
                                    double* y0);
GF_API gf_status gf_coupling_size(const gf_coupling* c, size_t* out);
GF_API gf_status gf_coupling_row_at(const gf_coupling* c, size_t index, gf_coupling_row* out);

/* ---- experiments ---- */

GF_API gf_status gf_evaluate_policy_renewal(const gf_model* model, const gf_candidate* cand,
                                            double* out);

typedef struct gf_grid_point {
    double a;
    double alpha;
    double beta;
    double b;
    double growth;
} gf_grid_point;

typedef struct gf_grid gf_grid;

GF_API gf_status gf_brute_force_boundaries(const gf_model* model, const gf_candidate* center,
                                           double radius, double step, gf_grid** out);
GF_API void gf_grid_destroy(gf_grid* grid);
GF_API gf_status gf_grid_best(const gf_grid* grid, gf_candidate* best, double* growth);
GF_API gf_status gf_grid_size(const gf_grid* grid, size_t* out);
GF_API gf_status gf_grid_point_at(const gf_grid* grid, size_t index, gf_grid_point* out);

typedef struct gf_sweep_row {
    double delta;
    double a;
    double alpha;
    double beta;
    double b;
    double l;
    double rho;
    double gap_lo;
    double gap_hi;
    double dist_A;
    double dist_B;
} gf_sweep_row;

typedef struct gf_report_summary {
    double slope_gap_lo;
    double slope_gap_hi;
    double slope_l_gap;
    size_t flag_count;
} gf_report_summary;

typedef struct gf_sweep gf_sweep;

/* Uses the model's gamma. A failed row stops the sweep: the call still returns
 * GF_OK with the solved rows, and gf_sweep_error reports the failure. */
GF_API gf_status gf_sweep_delta(const gf_model* model, const double* deltas, size_t n_deltas,
                                gf_sweep** out);
/* Builds a sweep from caller rows (e.g. read back from CSV) for reporting. */
GF_API gf_status gf_sweep_from_rows(const gf_model* model, const gf_sweep_row* rows, size_t n_rows,
                                    const gf_limit_candidate* limit, gf_sweep** out);
GF_API void gf_sweep_destroy(gf_sweep* sweep);
GF_API gf_status gf_sweep_size(const gf_sweep* sweep, size_t* out);
GF_API gf_status gf_sweep_row_at(const gf_sweep* sweep, size_t index, gf_sweep_row* out);
GF_API gf_status gf_sweep_limit_row(const gf_sweep* sweep, gf_sweep_row* out);
/* Empty string when every row was solved. */
GF_API gf_status gf_sweep_error(const gf_sweep* sweep, const char** text);
/* Text pointers stay valid until the sweep is destroyed or reported again. */
GF_API gf_status gf_convergence_report(gf_sweep* sweep, gf_report_summary* summary,
                                       const char** text, const char** csv);
GF_API gf_status gf_report_flag(const gf_sweep* sweep, size_t index, const char** text);
/* Caller frees nothing; the pointer is valid until the next call on this thread. */
GF_API const char* gf_sweep_plot_script(const char* csv_path);

#ifdef __cplusplus
}
#endif

#endif
