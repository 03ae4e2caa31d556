#pragma once

#include "market_model.hpp"
#include "verification.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace gf {

/// Reflecting limits (A, B), slope anchor x0 and growth excess l0 of the
/// pure-proportional-cost model.
struct LimitCandidate {
    double l0 = 0.0;
    double x0 = 0.0;
    double A = 0.0;
    double B = 0.0;

    std::array<double, 4> to_array() const { return {l0, x0, A, B}; }
    static LimitCandidate from_array(const std::array<double, 4>& v) {
        return {v[0], v[1], v[2], v[3]};
    }
};

struct LimitSolution {
    LimitCandidate candidate;
    double residual_norm = 0.0;
    int newton_iters = 0;
};

/// R1..R4: first- and second-order smooth pasting of g against the
/// proportional cost gradients at A and B.
std::array<double, 4> residual_system_limit(const MarketParams& mp, double gamma,
                                            const LimitCandidate& cand);

LimitCandidate default_limit_initializer(const MarketParams& mp);

LimitSolution solve_limit(const MarketParams& mp, double gamma,
                          std::optional<LimitCandidate> init = std::nullopt);

/// Solve from `count` random admissible starting points (no fallback path).
std::vector<LimitSolution> multi_start_limit(const MarketParams& mp, double gamma, int count,
                                             std::uint64_t seed);

/// Piecewise value function of the limit model: integral of g on [A, B],
/// log(1 + gamma x) below A and log(1 - gamma x) above B, continuous at A and B.
class LimitValueFunction {
public:
    LimitValueFunction(const MarketParams& mp, double gamma, const LimitCandidate& cand);

    double value(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;
    /// Max one-sided second-derivative mismatch at A and B.
    double c2_mismatch() const;

    const LimitCandidate& candidate() const noexcept { return cand_; }

private:
    MarketParams mp_;
    double gamma_;
    LimitCandidate cand_;
};

VerificationReport verify_hjb_limit(const MarketParams& mp, double gamma, const LimitSolution& sol,
                                    std::size_t grid_n, double tol = 1e-6,
                                    std::optional<double> claimed_l0 = std::nullopt);

}  // namespace gf
