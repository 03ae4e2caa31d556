#pragma once

#include "market_model.hpp"
#include "proportional_limit_solver.hpp"
#include "qvi_boundary_solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gf {

/// Per-start statistics of the restart chain on {alpha, beta} in transformed space.
struct RenewalLeg {
    double start = 0.0;
    double upper_exit_probability = 0.0;
    double expected_time = 0.0;
    double expected_reward = 0.0;
};

struct RenewalBreakdown {
    RenewalLeg from_alpha;
    RenewalLeg from_beta;
    double weight_alpha = 0.0;
    double weight_beta = 0.0;
    double log_factor_lower = 0.0;
    double log_factor_upper = 0.0;
    double growth = 0.0;
};

/// Exact long-run growth r + E[reward per cycle] / E[cycle length] of the
/// constant boundary strategy, where between trades the logit fraction is a
/// drifted Brownian motion.
RenewalBreakdown evaluate_policy_renewal_detail(const MarketParams& mp, const CostParams& cp,
                                                const BoundaryCandidate& cand);

double evaluate_policy_renewal(const MarketParams& mp, const CostParams& cp,
                               const BoundaryCandidate& cand);

struct GridPoint {
    double a, alpha, beta, b, growth;
};

struct BruteForceResult {
    BoundaryCandidate best;
    double best_growth = 0.0;
    std::vector<GridPoint> grid;
};

/// Exhaustive renewal evaluation of (a, alpha, beta, b) on center +- k*step,
/// |k*step| <= radius; unordered points are skipped. `best` carries the
/// center's l and x0.
BruteForceResult brute_force_boundaries(const MarketParams& mp, const CostParams& cp,
                                        const BoundaryCandidate& center, double radius, double step);

struct SweepRow {
    double delta = 0.0;
    double a = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double b = 0.0;
    double l = 0.0;
    double rho = 0.0;
    double gap_lo = 0.0;
    double gap_hi = 0.0;
    double dist_A = 0.0;
    double dist_B = 0.0;
};

struct SweepTable {
    MarketParams market;
    double gamma = 0.0;
    std::vector<SweepRow> rows;
    LimitSolution limit;
    /// Empty when every requested delta was solved.
    std::string error;

    bool complete() const { return error.empty(); }
    /// Limit row: delta = 0, a = A, b = B, l = l0; the gaps and distances are 0.
    SweepRow limit_row() const;
};

inline const std::vector<double> kDefaultSweepDeltas = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5, 1e-6};

SweepTable sweep_delta(const MarketParams& mp, double gamma, const std::vector<double>& deltas);

struct ConvergenceReport {
    double slope_gap_lo = 0.0;
    double slope_gap_hi = 0.0;
    double slope_l_gap = 0.0;
    std::vector<std::string> flags;
    std::string text;
    std::string csv;
};

/// Least-squares log-log slopes against delta and one flag per adjacent row
/// pair (or per row above the limit) that breaks a monotonicity property.
ConvergenceReport convergence_report(const SweepTable& table);

/// Standalone matplotlib script plotting the sweep CSV at `csv_path`.
std::string sweep_plot_script(const std::string& csv_path);

}  // namespace gf
