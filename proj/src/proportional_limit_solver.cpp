#include "proportional_limit_solver.hpp"

#include "errors.hpp"
#include "newton.hpp"
#include "path_rng.hpp"
#include "quadrature.hpp"
#include "slope_function.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

namespace {

bool ordered(const LimitCandidate& c) {
    return 0.0 < c.A && c.A < c.x0 && c.x0 < c.B && c.B < 1.0;
}

// Newton iterates only need a well-defined slope; A < x0 < B is checked on the root.
bool admissible(const std::array<double, 4>& v) {
    const LimitCandidate c = LimitCandidate::from_array(v);
    return 0.0 < c.A && c.A < c.B && c.B < 1.0 && 0.0 < c.x0 && c.x0 < 1.0 && c.l0 > 0.0;
}

bool structurally_valid(const MarketParams& mp, const LimitCandidate& c) {
    const double lo = std::max(growth_integrand(mp, 0.0), growth_integrand(mp, 1.0));
    const double hi = growth_integrand(mp, merton_fraction(mp));
    return ordered(c) && lo < c.l0 && c.l0 < hi;
}

std::optional<LimitSolution> newton_limit(const MarketParams& mp, double gamma,
                                          const LimitCandidate& init) {
    auto residual = [&](const std::array<double, 4>& v) {
        return residual_system_limit(mp, gamma, LimitCandidate::from_array(v));
    };
    NewtonResult<4> nr = damped_newton<4>(residual, init.to_array(), admissible);
    if (!nr.converged) {
        return std::nullopt;
    }
    LimitCandidate root = LimitCandidate::from_array(nr.x);
    if (!(root.A < root.x0 && root.x0 < root.B)) {
        try {
            root.x0 = reanchor_slope(mp, root.x0, root.l0, root.A, root.B);
        } catch (const Error&) {
            return std::nullopt;
        }
        nr = damped_newton<4>(residual, root.to_array(), admissible);
        if (!nr.converged) {
            return std::nullopt;
        }
    }
    LimitSolution sol{LimitCandidate::from_array(nr.x), nr.residual_norm, nr.iterations};
    if (!structurally_valid(mp, sol.candidate)) {
        return std::nullopt;
    }
    return sol;
}

double slope_fd_second(const SlopeFunction& g, double x) {
    const double h = 1e-5 * std::min(x, 1.0 - x);
    return (g(x + h) - g(x - h)) / (2.0 * h);
}

void check(VerificationReport& rep, double value, const char* what) {
    if (!(value <= rep.tol)) {
        rep.failures.push_back(what);
    }
}

}  // namespace

std::array<double, 4> residual_system_limit(const MarketParams& mp, double gamma,
                                            const LimitCandidate& c) {
    if (!(0.0 < c.A && c.A < c.B && c.B < 1.0)) {
        throw invalid_argument("residual_system_limit: candidate violates 0 < A < B < 1");
    }
    const SlopeFunction g(mp, c.x0, c.l0);
    const double up = 1.0 + gamma * c.A;
    const double dn = 1.0 - gamma * c.B;
    return {
        g(c.A) - gamma / up,
        g(c.B) + gamma / dn,
        g.derivative(c.A) + gamma * gamma / (up * up),
        g.derivative(c.B) + gamma * gamma / (dn * dn),
    };
}

LimitCandidate default_limit_initializer(const MarketParams& mp) {
    const double h = merton_fraction(mp);
    const double w = 0.5 * std::min(h, 1.0 - h);
    const double fh = growth_integrand(mp, h);
    const double floor = std::max(growth_integrand(mp, 0.0), growth_integrand(mp, 1.0));
    return {fh - 0.25 * (fh - floor), h, h - w, h + w};
}

LimitSolution solve_limit(const MarketParams& mp, double gamma, std::optional<LimitCandidate> init) {
    if (!(gamma > 0.0)) {
        throw parameter_degeneracy("solve_limit requires gamma > 0");
    }
    if (!(gamma < 1.0)) {
        throw invalid_argument("solve_limit requires gamma < 1");
    }
    if (init) {
        if (auto sol = newton_limit(mp, gamma, *init)) {
            return *sol;
        }
    }
    const LimitCandidate base = default_limit_initializer(mp);
    const double h = merton_fraction(mp);
    for (double shrink : {1.0, 0.5, 0.25, 1.5, 0.1}) {
        LimitCandidate start = base;
        const double w = (h - base.A) * shrink;
        start.A = h - std::min(w, 0.95 * h);
        start.B = h + std::min(w, 0.95 * (1.0 - h));
        if (auto sol = newton_limit(mp, gamma, start)) {
            return *sol;
        }
    }
    throw Error(ErrorCode::NonConvergence, "solve_limit: Newton failed from every start");
}

std::vector<LimitSolution> multi_start_limit(const MarketParams& mp, double gamma, int count,
                                             std::uint64_t seed) {
    const LimitCandidate base = default_limit_initializer(mp);
    const double h = merton_fraction(mp);
    const double w = h - base.A;
    const double fh = growth_integrand(mp, h);
    const double floor = std::max(growth_integrand(mp, 0.0), growth_integrand(mp, 1.0));
    PathRng rng(seed, 0, 11);
    std::vector<LimitSolution> out;
    for (int i = 0; i < count; ++i) {
        LimitCandidate start;
        start.A = h - w * (0.5 + rng.uniform());
        start.B = h + w * (0.5 + rng.uniform());
        start.x0 = h + 0.2 * w * (2.0 * rng.uniform() - 1.0);
        start.l0 = fh - (0.1 + 0.4 * rng.uniform()) * (fh - floor);
        auto sol = newton_limit(mp, gamma, start);
        if (!sol) {
            throw Error(ErrorCode::NonConvergence, "multi_start_limit: Newton failed from a random start");
        }
        out.push_back(*sol);
    }
    return out;
}

LimitValueFunction::LimitValueFunction(const MarketParams& mp, double gamma,
                                       const LimitCandidate& cand)
    : mp_(mp), gamma_(gamma), cand_(cand) {
    if (!ordered(cand)) {
        throw invalid_argument("LimitValueFunction: candidate violates 0 < A < x0 < B < 1");
    }
}

double LimitValueFunction::value(double x) const {
    const double vA = std::log1p(gamma_ * cand_.A);
    if (x <= cand_.A) {
        return std::log1p(gamma_ * x);
    }
    const SlopeFunction g(mp_, cand_.x0, cand_.l0);
    if (x <= cand_.B) {
        return vA + g.integral(cand_.A, x);
    }
    const double vB = vA + g.integral(cand_.A, cand_.B);
    return vB + std::log1p(-gamma_ * x) - std::log1p(-gamma_ * cand_.B);
}

double LimitValueFunction::derivative(double x) const {
    if (x <= cand_.A) {
        return gamma_ / (1.0 + gamma_ * x);
    }
    if (x <= cand_.B) {
        return slope_g(mp_, x, cand_.x0, cand_.l0);
    }
    return -gamma_ / (1.0 - gamma_ * x);
}

double LimitValueFunction::second_derivative(double x) const {
    if (x < cand_.A) {
        const double d = 1.0 + gamma_ * x;
        return -gamma_ * gamma_ / (d * d);
    }
    if (x <= cand_.B) {
        return slope_g_dx(mp_, x, cand_.x0, cand_.l0);
    }
    const double d = 1.0 - gamma_ * x;
    return -gamma_ * gamma_ / (d * d);
}

double LimitValueFunction::c2_mismatch() const {
    const SlopeFunction g(mp_, cand_.x0, cand_.l0);
    const double up = 1.0 + gamma_ * cand_.A;
    const double dn = 1.0 - gamma_ * cand_.B;
    return std::max(std::abs(g.derivative(cand_.A) + gamma_ * gamma_ / (up * up)),
                    std::abs(g.derivative(cand_.B) + gamma_ * gamma_ / (dn * dn)));
}

VerificationReport verify_hjb_limit(const MarketParams& mp, double gamma, const LimitSolution& sol,
                                    std::size_t grid_n, double tol,
                                    std::optional<double> claimed_l0) {
    if (grid_n < 100) {
        throw invalid_argument("verify_hjb_limit: grid_n must be >= 100");
    }
    const LimitCandidate& c = sol.candidate;
    const LimitValueFunction v(mp, gamma, c);
    const SlopeFunction g(mp, c.x0, c.l0);
    const double l0 = claimed_l0.value_or(c.l0);

    VerificationReport rep;
    rep.grid_n = grid_n;
    rep.tol = tol;
    rep.strict_margin = HUGE_VAL;
    const double lo = kFractionEps;
    const double hi = 1.0 - kFractionEps;
    for (std::size_t i = 0; i < grid_n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
        const double dv = v.derivative(x);
        const bool inside = x >= c.A && x <= c.B;
        const double ddv = inside ? slope_fd_second(g, x) : v.second_derivative(x);
        const double hjb = apply_generator(mp, 0.0, dv, ddv, x) + growth_integrand(mp, x) - l0;
        if (inside) {
            if (std::abs(hjb) > rep.max_interior_residual) {
                rep.max_interior_residual = std::abs(hjb);
                rep.worst_interior_x = x;
            }
        } else if (hjb > rep.max_exterior_excess) {
            rep.max_exterior_excess = hjb;
            rep.worst_exterior_x = x;
        }
        const double buy_bound = gamma / (1.0 + gamma * x);
        const double sell_bound = -gamma / (1.0 - gamma * x);
        const double viol = std::max({dv - buy_bound, sell_bound - dv, 0.0});
        if (viol > rep.max_intervention_excess) {
            rep.max_intervention_excess = viol;
            rep.worst_intervention_x = x;
        }
        if (x <= c.A) {
            rep.boundary_equality_gap = std::max(rep.boundary_equality_gap, std::abs(dv - buy_bound));
        } else {
            rep.strict_margin = std::min(rep.strict_margin, buy_bound - dv);
        }
        if (x >= c.B) {
            rep.boundary_equality_gap = std::max(rep.boundary_equality_gap, std::abs(dv - sell_bound));
        }
    }
    rep.pasting_mismatch = v.c2_mismatch();
    check(rep, rep.max_interior_residual, "interior HJB equality on [A, B]");
    check(rep, rep.max_exterior_excess, "D v + f - l <= 0 outside [A, B]");
    check(rep, rep.max_intervention_excess, "gradient constraints");
    check(rep, rep.boundary_equality_gap, "gradient equality outside (A, B)");
    check(rep, rep.pasting_mismatch, "C2 pasting at A and B");
    if (!(rep.strict_margin > 0.0)) {
        rep.failures.push_back("strict buy constraint above A");
    }
    return rep;
}

}  // namespace gf
