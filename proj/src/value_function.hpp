#pragma once

#include "market_model.hpp"
#include "qvi_boundary_solver.hpp"
#include "slope_function.hpp"
#include "verification.hpp"

#include <optional>
#include <vector>

namespace gf {

/// Piecewise QVI solution of the impulse model:
///   u(x) = Gamma(x, alpha)             for x <= a,
///   u(x) = u(a) + int_a^x g            for a < x <= b,
///   u(x) = u(beta) + Gamma(x, beta)    for x > b.
/// Cumulative integrals of g are cached on equispaced knots of [a, b].
class ValueFunction {
public:
    ValueFunction(const MarketParams& mp, const CostParams& cp, const BoundaryCandidate& cand);

    double value(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    /// Max of the C1 mismatch at a and b and the continuity jump at b.
    double pasting_mismatch() const;

    const BoundaryCandidate& candidate() const noexcept { return cand_; }
    const MarketParams& market() const noexcept { return mp_; }
    const CostParams& costs() const noexcept { return cp_; }
    const SlopeFunction& slope() const noexcept { return g_; }

private:
    double inner_value(double x) const;

    MarketParams mp_;
    CostParams cp_;
    BoundaryCandidate cand_;
    SlopeFunction g_;
    std::vector<double> knots_;
    std::vector<double> cumulative_;
    double u_a_;
    double u_beta_;
};

ValueFunction build_value(const MarketParams& mp, const CostParams& cp, const BoundarySolution& sol);

/// Grid check of max{D u + f - l, M u - u} = 0. `claimed_l` overrides the
/// candidate's l in the generator test (the pair (u, l) is what is verified).
VerificationReport verify_qvi(const MarketParams& mp, const CostParams& cp, const ValueFunction& vf,
                              std::size_t grid_n, double tol = 1e-6,
                              std::optional<double> claimed_l = std::nullopt);

}  // namespace gf
