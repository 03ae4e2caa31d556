#include "slope_function.hpp"

#include "errors.hpp"
#include "quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>

namespace gf {

namespace {

void require_open_unit(double x, const char* name) {
    if (!(x > 0.0 && x < 1.0)) {
        throw invalid_argument(std::string("slope_g: ") + name + " must lie in (0, 1)");
    }
}

}  // namespace

SlopeFunction::SlopeFunction(const MarketParams& mp, double x0, double l)
    : mp_(mp), x0_(x0), l_(l) {
    require_open_unit(x0, "x0");
    if (!std::isfinite(l)) {
        throw invalid_argument("slope_g: l must be finite");
    }
    const double h = merton_fraction(mp);
    exponent_ = 2.0 * h - 1.0;
    f1_ = growth_integrand(mp, 1.0);
    psi_x0_ = to_centered(x0);
    anchor_ = l - x0 * f1_;
    half_branch_ = std::abs(h - 0.5) < kHalfBranchThreshold;
    if (!half_branch_ && f1_ == 0.0) {
        throw parameter_degeneracy("slope_g: f(1) = 0 makes the power branch singular");
    }
}

double SlopeFunction::operator()(double x) const {
    require_open_unit(x, "x");
    const double q = x * (1.0 - x);
    if (half_branch_) {
        const double s2 = mp_.sigma_sq();
        return ((2.0 * l_ / s2) * (to_centered(x) - psi_x0_) - (x - x0_)) / q;
    }
    // ((1-x)/x)^e (x0/(1-x0))^e = exp(e (psi(x0) - psi(x)))
    const double ratio = std::exp(exponent_ * (psi_x0_ - to_centered(x)));
    return ((l_ - x * f1_) - anchor_ * ratio) / (q * f1_);
}

double SlopeFunction::derivative(double x) const {
    const double gx = (*this)(x);
    const double q = x * (1.0 - x);
    const double drift = q * (mp_.excess_drift() - mp_.sigma_sq() * x);
    return (-growth_integrand(mp_, x) + l_ - drift * gx) / (0.5 * mp_.sigma_sq() * q * q);
}

double SlopeFunction::integral(double lo, double hi) const {
    return integrate([this](double x) { return (*this)(x); }, lo, hi);
}

double slope_g(const MarketParams& mp, double x, double x0, double l) {
    return SlopeFunction(mp, x0, l)(x);
}

double slope_g_dx(const MarketParams& mp, double x, double x0, double l) {
    return SlopeFunction(mp, x0, l).derivative(x);
}

double reanchor_slope(const MarketParams& mp, double x0, double l, double lo, double hi) {
    const SlopeFunction g(mp, x0, l);
    const double g_lo = g(lo), g_hi = g(hi);
    if (g_lo == 0.0) return lo;
    if (g_hi == 0.0) return hi;
    if ((g_lo > 0.0) == (g_hi > 0.0)) {
        throw Error(ErrorCode::NonConvergence, "reanchor_slope: g has no sign change on the interval");
    }
    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        [&g](double x) { return g(x); }, lo, hi, g_lo, g_hi, boost::math::tools::eps_tolerance<double>(52),
        iters);
    return 0.5 * (bracket.first + bracket.second);
}

}  // namespace gf
