#pragma once

#include "errors.hpp"
#include "market_model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gf {

/// Unknowns of the fixed-plus-proportional problem: growth excess l, slope
/// anchor x0 and the constant boundaries a < alpha <= beta < b.
struct BoundaryCandidate {
    double l = 0.0;
    double x0 = 0.0;
    double a = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double b = 0.0;

    std::array<double, 6> to_array() const { return {l, x0, a, alpha, beta, b}; }
    static BoundaryCandidate from_array(const std::array<double, 6>& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
};

/// 0 < a < alpha <= beta < b < 1.
bool has_valid_ordering(const BoundaryCandidate& c);

struct ContinuationStep {
    double delta;
    BoundaryCandidate candidate;
};

struct BoundarySolution {
    BoundaryCandidate candidate;
    double residual_norm = 0.0;
    int newton_iters = 0;
    std::vector<ContinuationStep> continuation_trace;
    bool original_cost_optimal = false;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<ContinuationStep> trace)
        : Error(ErrorCode::NonConvergence, what), trace_(std::move(trace)) {}

    const std::vector<ContinuationStep>& trace() const noexcept { return trace_; }

private:
    std::vector<ContinuationStep> trace_;
};

inline constexpr double kContinuationStartDelta = 1e-2;

/// R1..R4 smooth pasting at alpha, beta, a, b; R5, R6 value matching at a and b.
std::array<double, 6> residual_system(const MarketParams& mp, const CostParams& cp,
                                      const BoundaryCandidate& cand);

/// Heuristic start built around the limit solution; `spread` scales the
/// prescribed gap constant c = (B - A)/4.
BoundaryCandidate heuristic_initializer(const MarketParams& mp, const CostParams& cp,
                                        double spread = 1.0);

/// Newton solve at the given costs from `init`; empty when Newton fails or the
/// root violates the structural invariants.
std::optional<BoundarySolution> solve_from(const MarketParams& mp, const CostParams& cp,
                                           const BoundaryCandidate& init);

/// Geometric walk in delta (factor 1/2 per step, refined on failure) from a
/// solved point to `target_delta`, warm-starting each solve.
BoundarySolution continue_boundaries(const MarketParams& mp, double gamma, double from_delta,
                                     const BoundaryCandidate& from, double target_delta);

BoundarySolution solve_boundaries(const MarketParams& mp, const CostParams& cp,
                                  std::optional<BoundaryCandidate> init = std::nullopt);

/// Newton from `count` random perturbations of the heuristic start (no continuation).
std::vector<BoundarySolution> multi_start_boundaries(const MarketParams& mp, const CostParams& cp,
                                                     int count, std::uint64_t seed);

/// Structural checks of a solved candidate: ordering, strict alpha < x0 < beta
/// for gamma > 0, and max{f(0), f(1)} < l < f(h_hat). Returns the failing
/// constraint text, empty when all hold.
std::string candidate_violation(const MarketParams& mp, const CostParams& cp,
                                const BoundaryCandidate& cand);

}  // namespace gf
