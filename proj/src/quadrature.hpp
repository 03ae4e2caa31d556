#pragma once

#include "errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace gf {

inline constexpr double kQuadratureTol = 1e-12;

/// Adaptive Gauss-Kronrod integral of f over [lo, hi] to an absolute error
/// target. Boost terminates on error <= tol * L1, so a one-pass L1 estimate
/// converts the absolute target into Boost's relative one.
template <class F>
double integrate(F&& f, double lo, double hi, double abs_tol = kQuadratureTol) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    if (lo == hi) {
        return 0.0;
    }
    if (lo > hi) {
        return -integrate(f, hi, lo, abs_tol);
    }
    double l1 = 0.0;
    GK::integrate(f, lo, hi, 0, 0.0, nullptr, &l1);
    const double rel = std::clamp(abs_tol / std::max(l1, 1e-300), 1e-15, 1e-3);
    double err = 0.0;
    const double value = GK::integrate(f, lo, hi, 15, rel, &err);
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::NumericalBlowup, "quadrature produced a non-finite value");
    }
    return value;
}

}  // namespace gf
