#include "market_model.hpp"

#include "errors.hpp"

#include <cmath>
#include <sstream>

namespace gf {

namespace {

std::string describe(const char* constraint, double value) {
    std::ostringstream os;
    os.precision(17);
    os << "violated constraint " << constraint << " (value " << value << ")";
    return os.str();
}

void require_unit_interval(double h, const char* name) {
    if (!(h >= 0.0 && h <= 1.0)) {
        throw invalid_argument(std::string(name) + " must lie in [0, 1]");
    }
}

double checked_log(double numerator, double denominator) {
    if (!(numerator > 0.0) || !(denominator > 0.0)) {
        throw invalid_argument("trade cost: logarithm argument is not positive");
    }
    return std::log(numerator / denominator);
}

}  // namespace

MarketParams::MarketParams(double r, double mu, double sigma) : r_(r), mu_(mu), sigma_(sigma) {
    if (!std::isfinite(r) || !std::isfinite(mu) || !std::isfinite(sigma)) {
        throw invalid_argument("market parameters must be finite");
    }
    if (!(sigma > 0.0)) {
        throw invalid_argument(describe("sigma > 0", sigma));
    }
    const double h = (mu - r) / (sigma * sigma);
    if (!(h > 0.0 && h < 1.0)) {
        throw invalid_argument(describe("0 < (mu - r)/sigma^2 < 1", h));
    }
}

CostParams::CostParams(double delta, double gamma) : delta_(delta), gamma_(gamma) {
    if (!(delta >= 0.0 && delta < 1.0)) {
        throw invalid_argument(describe("0 <= delta < 1", delta));
    }
    if (!(gamma >= 0.0)) {
        throw invalid_argument(describe("gamma >= 0", gamma));
    }
    if (!(gamma < 1.0 - delta)) {
        throw invalid_argument(describe("gamma < 1 - delta", gamma));
    }
}

Fraction Fraction::from_value(double h) {
    if (!(h > 0.0 && h < 1.0)) {
        throw invalid_argument("fraction must lie in (0, 1)");
    }
    return Fraction(h, 1.0 - h);
}

Fraction Fraction::from_parts(double h, double complement) {
    if (!(h > 0.0 && complement > 0.0)) {
        throw invalid_argument("fraction and complement must be positive");
    }
    return Fraction(h, complement);
}

double merton_fraction(const MarketParams& mp) {
    return mp.excess_drift() / mp.sigma_sq();
}

double growth_integrand(const MarketParams& mp, double h) {
    require_unit_interval(h, "risky fraction");
    return -0.5 * mp.sigma_sq() * h * h + mp.excess_drift() * h;
}

double to_centered(double h) {
    if (!(h > 0.0 && h < 1.0)) {
        throw invalid_argument("to_centered: fraction must lie in (0, 1)");
    }
    return std::log(h) - std::log1p(-h);
}

double to_centered(const Fraction& h) {
    return std::log(h.value()) - std::log(h.complement());
}

double from_centered(double y) {
    if (y >= 0.0) {
        return 1.0 / (1.0 + std::exp(-y));
    }
    const double e = std::exp(y);
    return e / (1.0 + e);
}

Fraction from_centered_fraction(double y) {
    return Fraction::from_parts(from_centered(y), from_centered(-y));
}

double from_centered_derivative(double y) {
    return from_centered(y) * from_centered(-y);
}

double growth_integrand_transformed(const MarketParams& mp, double y) {
    return growth_integrand(mp, from_centered(y));
}

double trade_cost_gamma(const CostParams& cp, double x, double y) {
    require_unit_interval(x, "Gamma: x");
    require_unit_interval(y, "Gamma: y");
    const double d = cp.delta();
    const double g = cp.gamma();
    if (y > x) {
        return checked_log(1.0 - d + g * x, 1.0 + g * y);
    }
    return checked_log(1.0 - d - g * x, 1.0 - g * y);
}

double trade_cost_gamma_dx(const CostParams& cp, double x, double y) {
    const double d = cp.delta();
    const double g = cp.gamma();
    if (y > x) {
        return g / (1.0 - d + g * x);
    }
    return -g / (1.0 - d - g * x);
}

double trade_cost_gamma_dy(const CostParams& cp, double x, double y) {
    const double g = cp.gamma();
    if (y > x) {
        return -g / (1.0 + g * y);
    }
    return g / (1.0 - g * y);
}

double wealth_factor(const CostParams& cp, double h, double xi) {
    require_unit_interval(h, "wealth_factor: h");
    require_unit_interval(xi, "wealth_factor: xi");
    const double d = cp.delta();
    const double g = cp.gamma();
    // Buy branch when the post-cost position must grow, i.e. xi (1 - delta) >= h.
    if (xi * (1.0 - d) >= h) {
        return (1.0 - d + g * h) / (1.0 + g * xi);
    }
    return (1.0 - d - g * h) / (1.0 - g * xi);
}

double trade_cost_transformed(const CostParams& cp, double y, double zeta) {
    return std::log(wealth_factor(cp, from_centered(y), from_centered(y + zeta)));
}

double apply_generator(const MarketParams& mp, double /*u_val*/, double du, double ddu, double x) {
    const double q = x * (1.0 - x);
    return q * (mp.excess_drift() - mp.sigma_sq() * x) * du + 0.5 * mp.sigma_sq() * q * q * ddu;
}

double apply_generator_transformed(const MarketParams& mp, double du, double ddu) {
    return 0.5 * mp.sigma_sq() * ddu + mp.centered_drift() * du;
}

}  // namespace gf
