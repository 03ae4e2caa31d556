#pragma once

#include "market_model.hpp"

namespace gf {

/// Explicit slope u' = g(., x0, l) of the continuation-region solution of
/// D u + f - l = 0, anchored so that g(x0) = 0.
class SlopeFunction {
public:
    SlopeFunction(const MarketParams& mp, double x0, double l);

    double operator()(double x) const;
    /// dg/dx from the continuation ODE solved for the second derivative.
    double derivative(double x) const;
    /// Integral of g over [lo, hi] (either order).
    double integral(double lo, double hi) const;

    double x0() const noexcept { return x0_; }
    double l() const noexcept { return l_; }
    bool uses_integral_branch() const noexcept { return half_branch_; }

private:
    MarketParams mp_;
    double x0_;
    double l_;
    double exponent_;  // 2 h_hat - 1
    double f1_;        // f(1)
    double psi_x0_;
    double anchor_;    // l - x0 f(1)
    bool half_branch_;
};

/// Branch switch threshold |h_hat - 1/2| for the integral form of g.
inline constexpr double kHalfBranchThreshold = 1e-6;

double slope_g(const MarketParams& mp, double x, double x0, double l);
double slope_g_dx(const MarketParams& mp, double x, double x0, double l);

/// g depends on x0 only through one scalar combination with l, so distinct
/// anchors can describe the same function. Returns the zero of g(., x0, l)
/// in [lo, hi], which must bracket a sign change.
double reanchor_slope(const MarketParams& mp, double x0, double l, double lo, double hi);

}  // namespace gf
