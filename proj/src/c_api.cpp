#include "growth_frictions/growth_frictions.h"

#include "convergence_lab.hpp"
#include "errors.hpp"
#include "market_model.hpp"
#include "path_simulator.hpp"
#include "proportional_limit_solver.hpp"
#include "qvi_boundary_solver.hpp"
#include "value_function.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

struct gf_model {
    gf::ModelConfig config;
};

struct gf_solution {
    gf::MarketParams market;
    gf::CostParams costs;
    gf::BoundarySolution solution;
    gf::ValueFunction value;
    std::vector<std::string> failures;
};

struct gf_limit {
    gf::MarketParams market;
    double gamma;
    gf::LimitSolution solution;
    std::vector<std::string> failures;
};

struct gf_path {
    std::vector<gf::PathSample> samples;
    double growth;
    std::size_t events;
};

struct gf_coupling {
    gf::CouplingTable table;
};

struct gf_grid {
    gf::BruteForceResult result;
};

struct gf_sweep {
    gf::SweepTable table;
    std::optional<gf::ConvergenceReport> report;
};

namespace {

thread_local std::string last_error;

gf_status fail(gf_status status, const std::string& message) {
    last_error = message;
    return status;
}

gf_status map_code(gf::ErrorCode code) {
    switch (code) {
        case gf::ErrorCode::InvalidArgument: return GF_INVALID_ARGUMENT;
        case gf::ErrorCode::ParameterDegeneracy: return GF_PARAMETER_DEGENERACY;
        case gf::ErrorCode::NonConvergence: return GF_NON_CONVERGENCE;
        case gf::ErrorCode::NumericalBlowup: return GF_NUMERICAL;
        case gf::ErrorCode::Io: return GF_IO;
        case gf::ErrorCode::Internal: break;
    }
    return GF_INTERNAL;
}

/// Runs body() and translates exceptions into status codes.
template <class Body>
gf_status guarded(Body&& body) {
    last_error.clear();
    try {
        body();
        return GF_OK;
    } catch (const gf::Error& e) {
        return fail(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(GF_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GF_INTERNAL, e.what());
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw gf::invalid_argument(what);
}

gf::BoundaryCandidate to_cpp(const gf_candidate& c) {
    return {c.l, c.x0, c.a, c.alpha, c.beta, c.b};
}

gf_candidate to_c(const gf::BoundaryCandidate& c) {
    return {c.l, c.x0, c.a, c.alpha, c.beta, c.b};
}

gf::LimitCandidate to_cpp(const gf_limit_candidate& c) {
    return {c.l0, c.x0, c.A, c.B};
}

gf_limit_candidate to_c(const gf::LimitCandidate& c) {
    return {c.l0, c.x0, c.A, c.B};
}

gf_verification to_c(const gf::VerificationReport& r) {
    gf_verification v{};
    v.grid_n = r.grid_n;
    v.tol = r.tol;
    v.max_interior_residual = r.max_interior_residual;
    v.worst_interior_x = r.worst_interior_x;
    v.max_exterior_excess = r.max_exterior_excess;
    v.worst_exterior_x = r.worst_exterior_x;
    v.max_intervention_excess = r.max_intervention_excess;
    v.worst_intervention_x = r.worst_intervention_x;
    v.boundary_equality_gap = r.boundary_equality_gap;
    v.target_at_lower = r.target_at_lower;
    v.target_at_upper = r.target_at_upper;
    v.pasting_mismatch = r.pasting_mismatch;
    v.strict_margin = r.strict_margin;
    v.passed = r.passed() ? 1 : 0;
    v.failure_count = r.failures.size();
    return v;
}

gf::SimConfig to_cpp(const gf_sim_config& c) {
    gf::SimConfig s;
    s.horizon = c.horizon;
    s.dt = c.dt;
    s.v0 = c.v0;
    if (c.has_h0) s.h0 = c.h0;
    s.n_paths = c.n_paths;
    s.base_seed = c.base_seed;
    s.bridge_correction = c.bridge_correction != 0;
    s.substeps = c.substeps;
    s.record_stride = c.record_stride;
    return s;
}

gf_growth_estimate to_c(const gf::GrowthEstimate& e) {
    return {e.mean,
            e.std_error,
            e.n_paths,
            e.horizon,
            e.dt,
            e.compensated_mean,
            e.compensated_std_error,
            e.trade_rate,
            e.buy_rate,
            e.sell_rate};
}

gf_sweep_row to_c(const gf::SweepRow& r) {
    return {r.delta, r.a, r.alpha, r.beta, r.b, r.l, r.rho, r.gap_lo, r.gap_hi, r.dist_A, r.dist_B};
}

gf_event to_c(gf::PathEvent e) {
    switch (e) {
        case gf::PathEvent::TradeLow: return GF_EVENT_TRADE_LO;
        case gf::PathEvent::TradeHigh: return GF_EVENT_TRADE_HI;
        case gf::PathEvent::ReflectLow: return GF_EVENT_REFLECT_LO;
        case gf::PathEvent::ReflectHigh: return GF_EVENT_REFLECT_HI;
        case gf::PathEvent::None: break;
    }
    return GF_EVENT_NONE;
}

std::unique_ptr<gf_solution> make_solution(const gf::ModelConfig& cfg, gf::BoundarySolution sol) {
    gf::ValueFunction vf = gf::build_value(cfg.market, cfg.costs, sol);
    return std::unique_ptr<gf_solution>(
        new gf_solution{cfg.market, cfg.costs, std::move(sol), std::move(vf), {}});
}

}  // namespace

extern "C" {

const char* gf_last_error(void) { return last_error.c_str(); }

const char* gf_status_name(gf_status status) {
    switch (status) {
        case GF_OK: return "ok";
        case GF_INVALID_ARGUMENT: return "invalid_argument";
        case GF_PARAMETER_DEGENERACY: return "parameter_degeneracy";
        case GF_NON_CONVERGENCE: return "non_convergence";
        case GF_NUMERICAL: return "numerical_blowup";
        case GF_IO: return "io";
        case GF_INTERNAL: return "internal";
    }
    return "unknown";
}

gf_status gf_model_create(double r, double mu, double sigma, double delta, double gamma,
                          gf_model** out) {
    return guarded([&] {
        require(out != nullptr, "gf_model_create: out is NULL");
        *out = new gf_model{gf::ModelConfig{gf::MarketParams(r, mu, sigma), gf::CostParams(delta, gamma)}};
    });
}

void gf_model_destroy(gf_model* model) { delete model; }

gf_status gf_merton_fraction(const gf_model* model, double* out) {
    return guarded([&] {
        require(model && out, "gf_merton_fraction: NULL argument");
        *out = gf::merton_fraction(model->config.market);
    });
}

gf_status gf_growth_integrand(const gf_model* model, double h, double* out) {
    return guarded([&] {
        require(model && out, "gf_growth_integrand: NULL argument");
        *out = gf::growth_integrand(model->config.market, h);
    });
}

gf_status gf_to_centered(double h, double* out) {
    return guarded([&] {
        require(out, "gf_to_centered: NULL argument");
        *out = gf::to_centered(h);
    });
}

gf_status gf_from_centered(double y, double* out) {
    return guarded([&] {
        require(out, "gf_from_centered: NULL argument");
        *out = gf::from_centered(y);
    });
}

gf_status gf_wealth_factor(const gf_model* model, double h, double xi, double* out) {
    return guarded([&] {
        require(model && out, "gf_wealth_factor: NULL argument");
        *out = gf::wealth_factor(model->config.costs, h, xi);
    });
}

gf_status gf_trade_cost_gamma(const gf_model* model, double x, double y, double* out) {
    return guarded([&] {
        require(model && out, "gf_trade_cost_gamma: NULL argument");
        *out = gf::trade_cost_gamma(model->config.costs, x, y);
    });
}

gf_status gf_solve_boundaries(const gf_model* model, const gf_candidate* init, gf_solution** out) {
    return guarded([&] {
        require(model && out, "gf_solve_boundaries: NULL argument");
        std::optional<gf::BoundaryCandidate> start;
        if (init) start = to_cpp(*init);
        gf::BoundarySolution sol = gf::solve_boundaries(model->config.market, model->config.costs, start);
        *out = make_solution(model->config, std::move(sol)).release();
    });
}

gf_status gf_solution_from_candidate(const gf_model* model, const gf_candidate* cand,
                                     gf_solution** out) {
    return guarded([&] {
        require(model && cand && out, "gf_solution_from_candidate: NULL argument");
        const gf::BoundaryCandidate c = to_cpp(*cand);
        require(gf::has_valid_ordering(c), "gf_solution_from_candidate: candidate violates 0 < a < alpha <= beta < b < 1");
        gf::BoundarySolution sol;
        sol.candidate = c;
        const auto res = gf::residual_system(model->config.market, model->config.costs, c);
        for (double v : res) sol.residual_norm = std::max(sol.residual_norm, std::abs(v));
        sol.original_cost_optimal = c.a <= c.alpha * (1.0 - model->config.costs.delta());
        *out = make_solution(model->config, std::move(sol)).release();
    });
}

void gf_solution_destroy(gf_solution* sol) { delete sol; }

gf_status gf_solution_info_get(const gf_solution* sol, gf_solution_info* out) {
    return guarded([&] {
        require(sol && out, "gf_solution_info_get: NULL argument");
        out->candidate = to_c(sol->solution.candidate);
        out->residual_norm = sol->solution.residual_norm;
        out->newton_iters = sol->solution.newton_iters;
        out->original_cost_optimal = sol->solution.original_cost_optimal ? 1 : 0;
    });
}

gf_status gf_solution_trace_size(const gf_solution* sol, size_t* out) {
    return guarded([&] {
        require(sol && out, "gf_solution_trace_size: NULL argument");
        *out = sol->solution.continuation_trace.size();
    });
}

gf_status gf_solution_trace_at(const gf_solution* sol, size_t index, double* delta, gf_candidate* cand) {
    return guarded([&] {
        require(sol && delta && cand, "gf_solution_trace_at: NULL argument");
        require(index < sol->solution.continuation_trace.size(), "gf_solution_trace_at: index out of range");
        const auto& step = sol->solution.continuation_trace[index];
        *delta = step.delta;
        *cand = to_c(step.candidate);
    });
}

gf_status gf_residual_system(const gf_model* model, const gf_candidate* cand, double out[6]) {
    return guarded([&] {
        require(model && cand && out, "gf_residual_system: NULL argument");
        const auto r = gf::residual_system(model->config.market, model->config.costs, to_cpp(*cand));
        std::copy(r.begin(), r.end(), out);
    });
}

gf_status gf_value_function(const gf_solution* sol, double x, double* u, double* du, double* ddu) {
    return guarded([&] {
        require(sol != nullptr, "gf_value_function: NULL solution");
        if (u) *u = sol->value.value(x);
        if (du) *du = sol->value.derivative(x);
        if (ddu) *ddu = sol->value.second_derivative(x);
    });
}

gf_status gf_verify_qvi(const gf_solution* sol, size_t grid_n, double tol, const double* claimed_l,
                        gf_verification* out) {
    return guarded([&] {
        require(sol && out, "gf_verify_qvi: NULL argument");
        std::optional<double> l;
        if (claimed_l) l = *claimed_l;
        gf::VerificationReport rep = gf::verify_qvi(sol->market, sol->costs, sol->value, grid_n, tol, l);
        *out = to_c(rep);
        const_cast<gf_solution*>(sol)->failures = std::move(rep.failures);
    });
}

gf_status gf_verification_failure(const gf_solution* sol, size_t index, const char** text) {
    return guarded([&] {
        require(sol && text, "gf_verification_failure: NULL argument");
        require(index < sol->failures.size(), "gf_verification_failure: index out of range");
        *text = sol->failures[index].c_str();
    });
}

gf_status gf_multi_start_boundaries(const gf_model* model, int count, uint64_t seed, gf_candidate* out,
                                    double* spread) {
    return guarded([&] {
        require(model && out, "gf_multi_start_boundaries: NULL argument");
        const auto sols = gf::multi_start_boundaries(model->config.market, model->config.costs, count, seed);
        require(!sols.empty(), "gf_multi_start_boundaries: count must be >= 1");
        for (std::size_t i = 0; i < sols.size(); ++i) out[i] = to_c(sols[i].candidate);
        if (spread) {
            double s = 0.0;
            const auto ref = sols.front().candidate.to_array();
            for (const auto& x : sols) {
                const auto v = x.candidate.to_array();
                for (std::size_t k = 0; k < v.size(); ++k) s = std::max(s, std::abs(v[k] - ref[k]));
            }
            *spread = s;
        }
    });
}

gf_status gf_solve_limit(const gf_model* model, gf_limit** out) {
    return guarded([&] {
        require(model && out, "gf_solve_limit: NULL argument");
        const double gamma = model->config.costs.gamma();
        gf::LimitSolution sol = gf::solve_limit(model->config.market, gamma);
        *out = new gf_limit{model->config.market, gamma, sol, {}};
    });
}

gf_status gf_limit_from_candidate(const gf_model* model, const gf_limit_candidate* cand, gf_limit** out) {
    return guarded([&] {
        require(model && cand && out, "gf_limit_from_candidate: NULL argument");
        const double gamma = model->config.costs.gamma();
        gf::LimitSolution sol;
        sol.candidate = to_cpp(*cand);
        require(0.0 < sol.candidate.A && sol.candidate.A < sol.candidate.B && sol.candidate.B < 1.0,
                "gf_limit_from_candidate: candidate violates 0 < A < B < 1");
        const auto res = gf::residual_system_limit(model->config.market, gamma, sol.candidate);
        for (double v : res) sol.residual_norm = std::max(sol.residual_norm, std::abs(v));
        *out = new gf_limit{model->config.market, gamma, sol, {}};
    });
}

void gf_limit_destroy(gf_limit* lim) { delete lim; }

gf_status gf_limit_info_get(const gf_limit* lim, gf_limit_info* out) {
    return guarded([&] {
        require(lim && out, "gf_limit_info_get: NULL argument");
        out->candidate = to_c(lim->solution.candidate);
        out->residual_norm = lim->solution.residual_norm;
        out->newton_iters = lim->solution.newton_iters;
        out->c2_mismatch = gf::LimitValueFunction(lim->market, lim->gamma, lim->solution.candidate).c2_mismatch();
    });
}

gf_status gf_residual_system_limit(const gf_model* model, const gf_limit_candidate* cand, double out[4]) {
    return guarded([&] {
        require(model && cand && out, "gf_residual_system_limit: NULL argument");
        const auto r = gf::residual_system_limit(model->config.market, model->config.costs.gamma(), to_cpp(*cand));
        std::copy(r.begin(), r.end(), out);
    });
}

gf_status gf_verify_hjb_limit(const gf_limit* lim, size_t grid_n, double tol, const double* claimed_l0,
                              gf_verification* out) {
    return guarded([&] {
        require(lim && out, "gf_verify_hjb_limit: NULL argument");
        std::optional<double> l0;
        if (claimed_l0) l0 = *claimed_l0;
        gf::VerificationReport rep = gf::verify_hjb_limit(lim->market, lim->gamma, lim->solution, grid_n, tol, l0);
        *out = to_c(rep);
        const_cast<gf_limit*>(lim)->failures = std::move(rep.failures);
    });
}

gf_status gf_limit_verification_failure(const gf_limit* lim, size_t index, const char** text) {
    return guarded([&] {
        require(lim && text, "gf_limit_verification_failure: NULL argument");
        require(index < lim->failures.size(), "gf_limit_verification_failure: index out of range");
        *text = lim->failures[index].c_str();
    });
}

gf_status gf_multi_start_limit(const gf_model* model, int count, uint64_t seed, gf_limit_candidate* out,
                               double* spread) {
    return guarded([&] {
        require(model && out, "gf_multi_start_limit: NULL argument");
        const auto sols = gf::multi_start_limit(model->config.market, model->config.costs.gamma(), count, seed);
        require(!sols.empty(), "gf_multi_start_limit: count must be >= 1");
        for (std::size_t i = 0; i < sols.size(); ++i) out[i] = to_c(sols[i].candidate);
        if (spread) {
            double s = 0.0;
            const auto ref = sols.front().candidate.to_array();
            for (const auto& x : sols) {
                const auto v = x.candidate.to_array();
                for (std::size_t k = 0; k < v.size(); ++k) s = std::max(s, std::abs(v[k] - ref[k]));
            }
            *spread = s;
        }
    });
}

void gf_sim_config_default(gf_sim_config* cfg) {
    if (!cfg) return;
    const gf::SimConfig d;
    *cfg = gf_sim_config{d.horizon, d.dt, d.v0, 0, 0.0, d.n_paths, d.base_seed, 0, d.substeps, d.record_stride};
}

const char* gf_event_name(gf_event event) {
    switch (event) {
        case GF_EVENT_TRADE_LO: return "trade_lo";
        case GF_EVENT_TRADE_HI: return "trade_hi";
        case GF_EVENT_REFLECT_LO: return "reflect_lo";
        case GF_EVENT_REFLECT_HI: return "reflect_hi";
        case GF_EVENT_NONE: break;
    }
    return "";
}

gf_status gf_estimate_growth_impulse(const gf_model* model, const gf_candidate* cand,
                                     const gf_sim_config* cfg, gf_growth_estimate* out) {
    return guarded([&] {
        require(model && cand && cfg && out, "gf_estimate_growth_impulse: NULL argument");
        *out = to_c(gf::estimate_growth_impulse(model->config.market, model->config.costs, to_cpp(*cand), to_cpp(*cfg)));
    });
}

gf_status gf_estimate_growth_reflected(const gf_model* model, double A, double B, const gf_sim_config* cfg,
                                       gf_growth_estimate* out) {
    return guarded([&] {
        require(model && cfg && out, "gf_estimate_growth_reflected: NULL argument");
        *out = to_c(gf::estimate_growth_reflected(model->config.market, model->config.costs.gamma(), A, B, to_cpp(*cfg)));
    });
}

gf_status gf_simulate_impulse_path(const gf_model* model, const gf_candidate* cand, const gf_sim_config* cfg,
                                   uint64_t path_index, gf_path** out) {
    return guarded([&] {
        require(model && cand && cfg && out, "gf_simulate_impulse_path: NULL argument");
        gf::PathRecord rec = gf::simulate_impulse_path(model->config.market, model->config.costs, to_cpp(*cand),
                                                       to_cpp(*cfg), path_index);
        *out = new gf_path{std::move(rec.samples), rec.growth, rec.trades.size()};
    });
}

gf_status gf_simulate_reflected_path(const gf_model* model, double A, double B, const gf_sim_config* cfg,
                                     uint64_t path_index, gf_path** out) {
    return guarded([&] {
        require(model && cfg && out, "gf_simulate_reflected_path: NULL argument");
        gf::ReflectedRecord rec = gf::simulate_reflected_path(model->config.market, model->config.costs.gamma(),
                                                              A, B, to_cpp(*cfg), path_index);
        *out = new gf_path{std::move(rec.samples), rec.growth, rec.lower_projections + rec.upper_projections};
    });
}

void gf_path_destroy(gf_path* path) { delete path; }

gf_status gf_path_size(const gf_path* path, size_t* out) {
    return guarded([&] {
        require(path && out, "gf_path_size: NULL argument");
        *out = path->samples.size();
    });
}

gf_status gf_path_sample_at(const gf_path* path, size_t index, gf_path_sample* out) {
    return guarded([&] {
        require(path && out, "gf_path_sample_at: NULL argument");
        require(index < path->samples.size(), "gf_path_sample_at: index out of range");
        const gf::PathSample& s = path->samples[index];
        *out = gf_path_sample{s.t, s.h, s.wealth, to_c(s.event)};
    });
}

gf_status gf_path_summary(const gf_path* path, double* growth, size_t* events) {
    return guarded([&] {
        require(path != nullptr, "gf_path_summary: NULL path");
        if (growth) *growth = path->growth;
        if (events) *events = path->events;
    });
}

gf_status gf_couple_paths(const gf_model* model, const double* deltas, size_t n_deltas,
                          const gf_sim_config* cfg, gf_coupling** out) {
    return guarded([&] {
        require(model && deltas && cfg && out, "gf_couple_paths: NULL argument");
        const std::vector<double> d(deltas, deltas + n_deltas);
        *out = new gf_coupling{gf::couple_paths(model->config.market, model->config.costs.gamma(), d, to_cpp(*cfg))};
    });
}

void gf_coupling_destroy(gf_coupling* c) { delete c; }

gf_status gf_coupling_limits(const gf_coupling* c, double* reflect_lo, double* reflect_hi, double* y0) {
    return guarded([&] {
        require(c != nullptr, "gf_coupling_limits: NULL coupling");
        if (reflect_lo) *reflect_lo = c->table.reflect_lo;
        if (reflect_hi) *reflect_hi = c->table.reflect_hi;
        if (y0) *y0 = c->table.y0;
    });
}

gf_status gf_coupling_size(const gf_coupling* c, size_t* out) {
    return guarded([&] {
        require(c && out, "gf_coupling_size: NULL argument");
        *out = c->table.rows.size();
    });
}

gf_status gf_coupling_row_at(const gf_coupling* c, size_t index, gf_coupling_row* out) {
    return guarded([&] {
        require(c && out, "gf_coupling_row_at: NULL argument");
        require(index < c->table.rows.size(), "gf_coupling_row_at: index out of range");
        const gf::CouplingRow& r = c->table.rows[index];
        double trades = 0.0;
        for (std::size_t t : r.trades_per_path) trades += static_cast<double>(t);
        if (!r.trades_per_path.empty()) trades /= static_cast<double>(r.trades_per_path.size());
        *out = gf_coupling_row{r.delta,
                               r.levels.lo_exit,
                               r.levels.lo_target,
                               r.levels.hi_target,
                               r.levels.hi_exit,
                               r.mean_sup_distance,
                               r.std_error,
                               r.min_jump,
                               trades};
    });
}

gf_status gf_evaluate_policy_renewal(const gf_model* model, const gf_candidate* cand, double* out) {
    return guarded([&] {
        require(model && cand && out, "gf_evaluate_policy_renewal: NULL argument");
        *out = gf::evaluate_policy_renewal(model->config.market, model->config.costs, to_cpp(*cand));
    });
}

gf_status gf_brute_force_boundaries(const gf_model* model, const gf_candidate* center, double radius,
                                    double step, gf_grid** out) {
    return guarded([&] {
        require(model && center && out, "gf_brute_force_boundaries: NULL argument");
        *out = new gf_grid{gf::brute_force_boundaries(model->config.market, model->config.costs,
                                                      to_cpp(*center), radius, step)};
    });
}

void gf_grid_destroy(gf_grid* grid) { delete grid; }

gf_status gf_grid_best(const gf_grid* grid, gf_candidate* best, double* growth) {
    return guarded([&] {
        require(grid != nullptr, "gf_grid_best: NULL grid");
        if (best) *best = to_c(grid->result.best);
        if (growth) *growth = grid->result.best_growth;
    });
}

gf_status gf_grid_size(const gf_grid* grid, size_t* out) {
    return guarded([&] {
        require(grid && out, "gf_grid_size: NULL argument");
        *out = grid->result.grid.size();
    });
}

gf_status gf_grid_point_at(const gf_grid* grid, size_t index, gf_grid_point* out) {
    return guarded([&] {
        require(grid && out, "gf_grid_point_at: NULL argument");
        require(index < grid->result.grid.size(), "gf_grid_point_at: index out of range");
        const gf::GridPoint& p = grid->result.grid[index];
        *out = gf_grid_point{p.a, p.alpha, p.beta, p.b, p.growth};
    });
}

gf_status gf_sweep_delta(const gf_model* model, const double* deltas, size_t n_deltas, gf_sweep** out) {
    return guarded([&] {
        require(model && deltas && out, "gf_sweep_delta: NULL argument");
        const std::vector<double> d(deltas, deltas + n_deltas);
        *out = new gf_sweep{gf::sweep_delta(model->config.market, model->config.costs.gamma(), d), std::nullopt};
    });
}

gf_status gf_sweep_from_rows(const gf_model* model, const gf_sweep_row* rows, size_t n_rows,
                             const gf_limit_candidate* limit, gf_sweep** out) {
    return guarded([&] {
        require(model && (rows || n_rows == 0) && limit && out, "gf_sweep_from_rows: NULL argument");
        gf::LimitSolution lim;
        lim.candidate = to_cpp(*limit);
        gf::SweepTable table{model->config.market, model->config.costs.gamma(), {}, lim, {}};
        for (size_t i = 0; i < n_rows; ++i) {
            const gf_sweep_row& r = rows[i];
            table.rows.push_back({r.delta, r.a, r.alpha, r.beta, r.b, r.l, r.rho, r.gap_lo, r.gap_hi, r.dist_A, r.dist_B});
        }
        *out = new gf_sweep{std::move(table), std::nullopt};
    });
}

void gf_sweep_destroy(gf_sweep* sweep) { delete sweep; }

gf_status gf_sweep_size(const gf_sweep* sweep, size_t* out) {
    return guarded([&] {
        require(sweep && out, "gf_sweep_size: NULL argument");
        *out = sweep->table.rows.size();
    });
}

gf_status gf_sweep_row_at(const gf_sweep* sweep, size_t index, gf_sweep_row* out) {
    return guarded([&] {
        require(sweep && out, "gf_sweep_row_at: NULL argument");
        require(index < sweep->table.rows.size(), "gf_sweep_row_at: index out of range");
        *out = to_c(sweep->table.rows[index]);
    });
}

gf_status gf_sweep_limit_row(const gf_sweep* sweep, gf_sweep_row* out) {
    return guarded([&] {
        require(sweep && out, "gf_sweep_limit_row: NULL argument");
        *out = to_c(sweep->table.limit_row());
    });
}

gf_status gf_sweep_error(const gf_sweep* sweep, const char** text) {
    return guarded([&] {
        require(sweep && text, "gf_sweep_error: NULL argument");
        *text = sweep->table.error.c_str();
    });
}

gf_status gf_convergence_report(gf_sweep* sweep, gf_report_summary* summary, const char** text,
                                const char** csv) {
    return guarded([&] {
        require(sweep != nullptr, "gf_convergence_report: NULL sweep");
        sweep->report = gf::convergence_report(sweep->table);
        const gf::ConvergenceReport& r = *sweep->report;
        if (summary) *summary = gf_report_summary{r.slope_gap_lo, r.slope_gap_hi, r.slope_l_gap, r.flags.size()};
        if (text) *text = r.text.c_str();
        if (csv) *csv = r.csv.c_str();
    });
}

gf_status gf_report_flag(const gf_sweep* sweep, size_t index, const char** text) {
    return guarded([&] {
        require(sweep && text, "gf_report_flag: NULL argument");
        require(sweep->report.has_value(), "gf_report_flag: no report computed");
        require(index < sweep->report->flags.size(), "gf_report_flag: index out of range");
        *text = sweep->report->flags[index].c_str();
    });
}

const char* gf_sweep_plot_script(const char* csv_path) {
    thread_local std::string script;
    script = gf::sweep_plot_script(csv_path ? csv_path : "sweep.csv");
    return script.c_str();
}

}  // extern "C"
