#pragma once

// Model vocabulary shared by every solver and simulator: Black-Scholes market
// coefficients, fixed-plus-proportional frictions, the log-growth integrand,
// the logit coordinate change and the generators in both coordinates.

namespace gf {

/// Bond rate, stock drift and volatility. The Merton fraction must lie in (0, 1).
class MarketParams {
public:
    MarketParams(double r, double mu, double sigma);

    double r() const noexcept { return r_; }
    double mu() const noexcept { return mu_; }
    double sigma() const noexcept { return sigma_; }
    double sigma_sq() const noexcept { return sigma_ * sigma_; }
    double excess_drift() const noexcept { return mu_ - r_; }
    /// Drift of the logit risky fraction between trades, mu - r - sigma^2 / 2.
    double centered_drift() const noexcept { return mu_ - r_ - 0.5 * sigma_ * sigma_; }

private:
    double r_;
    double mu_;
    double sigma_;
};

/// delta: fixed cost as a fraction of wealth; gamma: cost per unit traded volume.
class CostParams {
public:
    CostParams(double delta, double gamma);

    double delta() const noexcept { return delta_; }
    double gamma() const noexcept { return gamma_; }

private:
    double delta_;
    double gamma_;
};

struct ModelConfig {
    MarketParams market;
    CostParams costs;
};

/// Fraction in (0, 1) carried together with its complement, so that values
/// close to 1 keep full relative precision in 1 - h.
class Fraction {
public:
    static Fraction from_value(double h);
    static Fraction from_parts(double h, double complement);

    double value() const noexcept { return value_; }
    double complement() const noexcept { return complement_; }

private:
    Fraction(double h, double c) : value_(h), complement_(c) {}
    double value_;
    double complement_;
};

/// Degenerate-endpoint guard for fraction grids: [kFractionEps, 1 - kFractionEps].
inline constexpr double kFractionEps = 1e-9;

double merton_fraction(const MarketParams& mp);

/// f(h) = -sigma^2 h^2 / 2 + (mu - r) h on [0, 1].
double growth_integrand(const MarketParams& mp, double h);

/// psi(h) = log h - log(1 - h).
double to_centered(double h);
double to_centered(const Fraction& h);
/// phi(y) = e^y / (1 + e^y).
double from_centered(double y);
Fraction from_centered_fraction(double y);
/// phi'(y) = phi(y)(1 - phi(y)).
double from_centered_derivative(double y);

double growth_integrand_transformed(const MarketParams& mp, double y);

/// Modified log-cost Gamma(x, y) of moving the risky fraction from x to y.
double trade_cost_gamma(const CostParams& cp, double x, double y);
/// d/dx Gamma(x, y) and d/dy Gamma(x, y) on the branch selected by (x, y).
double trade_cost_gamma_dx(const CostParams& cp, double x, double y);
double trade_cost_gamma_dy(const CostParams& cp, double x, double y);

/// Exact multiplicative wealth retention V_after / V_before of a rebalance from h to xi.
double wealth_factor(const CostParams& cp, double h, double xi);

/// log wealth_factor(phi(y), phi(y + zeta)).
double trade_cost_transformed(const CostParams& cp, double y, double zeta);

/// D u(x) = x(1-x)(mu - r - sigma^2 x) u'(x) + sigma^2 x^2 (1-x)^2 u''(x) / 2.
double apply_generator(const MarketParams& mp, double u_val, double du, double ddu, double x);

/// Constant-coefficient generator of the logit fraction: sigma^2/2 u'' + (mu - r - sigma^2/2) u'.
double apply_generator_transformed(const MarketParams& mp, double du, double ddu);

}  // namespace gf
