#include "exit_statistics.hpp"

#include "errors.hpp"
#include "quadrature.hpp"

#include <cmath>

namespace gf {

namespace {

/// Below this |kappa (hi - lo)| the closed-form exit time loses digits to cancellation.
constexpr double kSmallDriftWidth = 1e-3;

}  // namespace

DriftedBrownianExit::DriftedBrownianExit(double drift, double sigma, double lo, double hi)
    : drift_(drift), sigma_sq_(sigma * sigma), kappa_(2.0 * drift / (sigma * sigma)), lo_(lo), hi_(hi) {
    if (!(sigma > 0.0) || !std::isfinite(drift)) {
        throw invalid_argument("DriftedBrownianExit: requires sigma > 0 and finite drift");
    }
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw invalid_argument("DriftedBrownianExit: requires finite lo < hi");
    }
    s_hi_ = scale(hi);
}

double DriftedBrownianExit::scale(double y) const {
    const double u = y - lo_;
    if (kappa_ == 0.0) {
        return u;
    }
    return -std::expm1(-kappa_ * u) / kappa_;
}

double DriftedBrownianExit::upper_exit_probability(double y) const {
    if (y <= lo_) return 0.0;
    if (y >= hi_) return 1.0;
    return scale(y) / s_hi_;
}

double DriftedBrownianExit::expected_exit_time(double y) const {
    if (y <= lo_ || y >= hi_) {
        return 0.0;
    }
    if (drift_ == 0.0) {
        return (y - lo_) * (hi_ - y) / sigma_sq_;
    }
    if (std::abs(kappa_) * (hi_ - lo_) < kSmallDriftWidth) {
        return expected_occupation_integral([](double) { return 1.0; }, y);
    }
    const double p = upper_exit_probability(y);
    return (p * (hi_ - lo_) - (y - lo_)) / drift_;
}

double DriftedBrownianExit::expected_occupation_integral(const std::function<double(double)>& f,
                                                         double y, double abs_tol) const {
    if (y <= lo_ || y >= hi_) {
        return 0.0;
    }
    if (kappa_ < 0.0) {
        const DriftedBrownianExit mirrored(-drift_, std::sqrt(sigma_sq_), -hi_, -lo_);
        return mirrored.expected_occupation_integral([&f](double z) { return f(-z); }, -y, abs_tol);
    }
    // Green's function with the exponentials folded in so that every factor
    // stays O(hi - lo) for large kappa >= 0.
    const double k = kappa_;
    auto em = [k](double u) { return k == 0.0 ? u : -std::expm1(-k * u) / k; };
    const double below = integrate(
        [&](double z) { return std::exp(-k * (y - z)) * em(z - lo_) * f(z); }, lo_, y, abs_tol);
    const double above = integrate([&](double z) { return em(hi_ - z) * f(z); }, y, hi_, abs_tol);
    return 2.0 / sigma_sq_ * (em(hi_ - y) * below + em(y - lo_) * above) / em(hi_ - lo_);
}

}  // namespace gf
