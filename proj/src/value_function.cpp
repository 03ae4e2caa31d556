#include "value_function.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

namespace {

constexpr std::size_t kKnots = 64;

void check(VerificationReport& rep, double value, const char* what) {
    if (!(value <= rep.tol)) {
        rep.failures.push_back(what);
    }
}

}  // namespace

ValueFunction::ValueFunction(const MarketParams& mp, const CostParams& cp,
                             const BoundaryCandidate& cand)
    : mp_(mp), cp_(cp), cand_(cand), g_(mp, cand.x0, cand.l) {
    if (!has_valid_ordering(cand)) {
        throw invalid_argument("ValueFunction: candidate violates 0 < a < alpha <= beta < b < 1");
    }
    knots_.resize(kKnots + 1);
    cumulative_.resize(kKnots + 1);
    const double w = (cand.b - cand.a) / static_cast<double>(kKnots);
    for (std::size_t k = 0; k <= kKnots; ++k) {
        knots_[k] = k == kKnots ? cand.b : cand.a + w * static_cast<double>(k);
    }
    cumulative_[0] = 0.0;
    for (std::size_t k = 1; k <= kKnots; ++k) {
        cumulative_[k] = cumulative_[k - 1] + g_.integral(knots_[k - 1], knots_[k]);
    }
    u_a_ = trade_cost_gamma(cp, cand.a, cand.alpha);
    u_beta_ = inner_value(cand.beta);
}

double ValueFunction::inner_value(double x) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const std::size_t k = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    const std::size_t kk = std::min(k, kKnots - 1);
    return u_a_ + cumulative_[kk] + g_.integral(knots_[kk], x);
}

double ValueFunction::value(double x) const {
    if (x <= cand_.a) {
        return trade_cost_gamma(cp_, x, cand_.alpha);
    }
    if (x <= cand_.b) {
        return inner_value(x);
    }
    return u_beta_ + trade_cost_gamma(cp_, x, cand_.beta);
}

double ValueFunction::derivative(double x) const {
    if (x <= cand_.a) {
        return trade_cost_gamma_dx(cp_, x, cand_.alpha);
    }
    if (x <= cand_.b) {
        return g_(x);
    }
    return trade_cost_gamma_dx(cp_, x, cand_.beta);
}

double ValueFunction::second_derivative(double x) const {
    const double d = cp_.delta();
    const double gm = cp_.gamma();
    if (x < cand_.a) {
        const double s = 1.0 - d + gm * x;
        return -gm * gm / (s * s);
    }
    if (x <= cand_.b) {
        return g_.derivative(x);
    }
    const double s = 1.0 - d - gm * x;
    return -gm * gm / (s * s);
}

double ValueFunction::pasting_mismatch() const {
    const double at_a = std::abs(g_(cand_.a) - trade_cost_gamma_dx(cp_, cand_.a, cand_.alpha));
    const double at_b = std::abs(g_(cand_.b) - trade_cost_gamma_dx(cp_, cand_.b, cand_.beta));
    const double jump_b = std::abs(inner_value(cand_.b) -
                                   (u_beta_ + trade_cost_gamma(cp_, cand_.b, cand_.beta)));
    // The lower piece is Gamma(x, alpha) itself, which presumes u(alpha) = 0.
    const double at_alpha = std::abs(inner_value(cand_.alpha));
    return std::max({at_a, at_b, jump_b, at_alpha});
}

ValueFunction build_value(const MarketParams& mp, const CostParams& cp, const BoundarySolution& sol) {
    return ValueFunction(mp, cp, sol.candidate);
}

VerificationReport verify_qvi(const MarketParams& mp, const CostParams& cp, const ValueFunction& vf,
                              std::size_t grid_n, double tol, std::optional<double> claimed_l) {
    if (grid_n < 100) {
        throw invalid_argument("verify_qvi: grid_n must be >= 100");
    }
    const BoundaryCandidate& c = vf.candidate();
    const double l = claimed_l.value_or(c.l);
    const double d = cp.delta();
    const double gm = cp.gamma();

    VerificationReport rep;
    rep.grid_n = grid_n;
    rep.tol = tol;

    const double lo = kFractionEps;
    const double hi = 1.0 - kFractionEps;
    std::vector<double> xs(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
    }
    const double spacing = xs[1] - xs[0];

    // Generator test. Inside [a, b] the second derivative is a central
    // difference of g, independent of the ODE form used by the solver.
    for (double x : xs) {
        const bool inside = x >= c.a && x <= c.b;
        double ddu;
        if (inside) {
            const double h = 1e-5 * std::min(x, 1.0 - x);
            ddu = (vf.slope()(x + h) - vf.slope()(x - h)) / (2.0 * h);
        } else {
            ddu = vf.second_derivative(x);
        }
        const double r = apply_generator(mp, 0.0, vf.derivative(x), ddu, x) + growth_integrand(mp, x) - l;
        if (inside) {
            if (std::abs(r) > rep.max_interior_residual) {
                rep.max_interior_residual = std::abs(r);
                rep.worst_interior_x = x;
            }
        } else if (r > rep.max_exterior_excess) {
            rep.max_exterior_excess = r;
            rep.worst_exterior_x = x;
        }
    }

    // Intervention test on targets = grid plus the exact restart levels.
    std::vector<double> ys = xs;
    ys.push_back(c.alpha);
    ys.push_back(c.beta);
    std::vector<double> uy(ys.size()), log_buy(ys.size()), log_sell(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
        uy[j] = vf.value(ys[j]);
        log_buy[j] = std::log1p(gm * ys[j]);
        log_sell[j] = std::log1p(-gm * ys[j]);
    }
    auto intervention = [&](double x, double& best_y) {
        const double up = std::log(1.0 - d + gm * x);
        const double dn = std::log(1.0 - d - gm * x);
        double best = -HUGE_VAL;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double val = uy[j] + (ys[j] > x ? up - log_buy[j] : dn - log_sell[j]);
            if (val > best) {
                best = val;
                best_y = ys[j];
            }
        }
        return best - vf.value(x);
    };
    for (double x : xs) {
        double y = 0.0;
        const double gap = intervention(x, y);
        if (gap > rep.max_intervention_excess) {
            rep.max_intervention_excess = gap;
            rep.worst_intervention_x = x;
        }
    }
    const double gap_a = intervention(c.a, rep.target_at_lower);
    const double gap_b = intervention(c.b, rep.target_at_upper);
    rep.boundary_equality_gap = std::max(std::abs(gap_a), std::abs(gap_b));
    rep.pasting_mismatch = vf.pasting_mismatch();

    check(rep, rep.max_interior_residual, "interior D u + f - l = 0 on [a, b]");
    check(rep, rep.max_exterior_excess, "D u + f - l <= 0 outside [a, b]");
    check(rep, rep.max_intervention_excess, "M u - u <= 0");
    check(rep, rep.boundary_equality_gap, "M u = u at a and b");
    check(rep, rep.pasting_mismatch, "C1 pasting and value matching at a and b");
    if (std::abs(rep.target_at_lower - c.alpha) > spacing) {
        rep.failures.push_back("M u at a is not attained at alpha");
    }
    if (std::abs(rep.target_at_upper - c.beta) > spacing) {
        rep.failures.push_back("M u at b is not attained at beta");
    }
    return rep;
}

}  // namespace gf
