#include "qvi_boundary_solver.hpp"

#include "newton.hpp"
#include "path_rng.hpp"
#include "proportional_limit_solver.hpp"
#include "slope_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gf {

namespace {

constexpr int kMaxStepRefinements = 12;

bool admissible(const std::array<double, 6>& v) {
    const BoundaryCandidate c = BoundaryCandidate::from_array(v);
    return has_valid_ordering(c) && c.x0 > 0.0 && c.x0 < 1.0 && c.l > 0.0 && c.alpha < c.beta;
}

std::string delta_text(double delta) {
    std::ostringstream os;
    os.precision(6);
    os << delta;
    return os.str();
}

}  // namespace

bool has_valid_ordering(const BoundaryCandidate& c) {
    return 0.0 < c.a && c.a < c.alpha && c.alpha <= c.beta && c.beta < c.b && c.b < 1.0;
}

std::array<double, 6> residual_system(const MarketParams& mp, const CostParams& cp,
                                      const BoundaryCandidate& cand) {
    if (!has_valid_ordering(cand)) {
        throw invalid_argument("residual_system: candidate violates 0 < a < alpha <= beta < b < 1");
    }
    const SlopeFunction g(mp, cand.x0, cand.l);
    const double d = cp.delta();
    const double gm = cp.gamma();
    return {
        g(cand.alpha) - gm / (1.0 + gm * cand.alpha),
        g(cand.beta) + gm / (1.0 - gm * cand.beta),
        g(cand.a) - gm / (1.0 - d + gm * cand.a),
        g(cand.b) + gm / (1.0 - d - gm * cand.b),
        g.integral(cand.a, cand.alpha) + trade_cost_gamma(cp, cand.a, cand.alpha),
        g.integral(cand.beta, cand.b) - trade_cost_gamma(cp, cand.b, cand.beta),
    };
}

BoundaryCandidate heuristic_initializer(const MarketParams& mp, const CostParams& cp,
                                        double spread) {
    const LimitSolution lim = solve_limit(mp, cp.gamma());
    const double A = lim.candidate.A;
    const double B = lim.candidate.B;
    const double k = spread * 0.25 * (B - A) * std::cbrt(cp.delta());

    BoundaryCandidate c;
    c.a = std::max(A - k, 0.5 * A);
    c.alpha = A + k;
    c.beta = B - k;
    c.b = std::min(B + k, 0.5 * (1.0 + B));
    if (c.alpha >= c.beta) {
        const double mid = 0.5 * (A + B);
        c.alpha = mid - 0.05 * (B - A);
        c.beta = mid + 0.05 * (B - A);
    }
    c.l = lim.candidate.l0 - cp.delta();
    const double margin = 1e-3 * (c.beta - c.alpha);
    c.x0 = std::clamp(merton_fraction(mp), c.alpha + margin, c.beta - margin);
    return c;
}

std::string candidate_violation(const MarketParams& mp, const CostParams& cp,
                                const BoundaryCandidate& c) {
    if (!has_valid_ordering(c)) {
        return "ordering 0 < a < alpha <= beta < b < 1";
    }
    if (!(c.alpha <= c.x0 && c.x0 <= c.beta)) {
        return "alpha <= x0 <= beta";
    }
    if (cp.gamma() > 0.0 && !(c.alpha < c.x0 && c.x0 < c.beta)) {
        return "alpha < x0 < beta for gamma > 0";
    }
    const double lo = std::max(growth_integrand(mp, 0.0), growth_integrand(mp, 1.0));
    const double hi = growth_integrand(mp, merton_fraction(mp));
    if (!(lo < c.l && c.l < hi)) {
        return "max{f(0), f(1)} < l < f(h_hat)";
    }
    return {};
}

std::optional<BoundarySolution> solve_from(const MarketParams& mp, const CostParams& cp,
                                           const BoundaryCandidate& init) {
    auto residual = [&](const std::array<double, 6>& v) {
        return residual_system(mp, cp, BoundaryCandidate::from_array(v));
    };
    NewtonResult<6> nr = damped_newton<6>(residual, init.to_array(), admissible);
    if (!nr.converged) {
        return std::nullopt;
    }
    BoundaryCandidate root = BoundaryCandidate::from_array(nr.x);
    if (!(root.alpha < root.x0 && root.x0 < root.beta) && root.alpha < root.beta) {
        try {
            root.x0 = reanchor_slope(mp, root.x0, root.l, root.alpha, root.beta);
        } catch (const Error&) {
            return std::nullopt;
        }
        nr = damped_newton<6>(residual, root.to_array(), admissible);
        if (!nr.converged) {
            return std::nullopt;
        }
    }
    BoundarySolution sol;
    sol.candidate = BoundaryCandidate::from_array(nr.x);
    sol.residual_norm = nr.residual_norm;
    sol.newton_iters = nr.iterations;
    // alpha == beta at gamma > 0 is a spurious root; the caller retries.
    if (!candidate_violation(mp, cp, sol.candidate).empty()) {
        return std::nullopt;
    }
    sol.original_cost_optimal = sol.candidate.a <= sol.candidate.alpha * (1.0 - cp.delta());
    sol.continuation_trace.push_back({cp.delta(), sol.candidate});
    return sol;
}

BoundarySolution continue_boundaries(const MarketParams& mp, double gamma, double from_delta,
                                     const BoundaryCandidate& from, double target_delta) {
    std::vector<ContinuationStep> trace{{from_delta, from}};
    double cur_delta = from_delta;
    BoundaryCandidate cur = from;
    std::optional<BoundarySolution> last;
    if (cur_delta == target_delta) {
        last = solve_from(mp, CostParams(cur_delta, gamma), cur);
        if (!last) {
            throw NonConvergence("continuation: start point does not solve at delta=" +
                                     delta_text(cur_delta),
                                 trace);
        }
    }
    while (cur_delta != target_delta) {
        const bool downward = target_delta < cur_delta;
        double log_step = std::log(0.5);
        bool advanced = false;
        for (int refine = 0; refine <= kMaxStepRefinements && !advanced; ++refine) {
            double next = cur_delta * std::exp(downward ? log_step : -log_step);
            if ((downward && next <= target_delta) || (!downward && next >= target_delta)) {
                next = target_delta;
            }
            last = solve_from(mp, CostParams(next, gamma), cur);
            if (last) {
                cur_delta = next;
                cur = last->candidate;
                trace.push_back({cur_delta, cur});
                advanced = true;
            } else {
                log_step *= 0.5;
            }
        }
        if (!advanced) {
            throw NonConvergence("continuation stalled at delta=" + delta_text(cur_delta), trace);
        }
    }
    BoundarySolution sol = *last;
    sol.continuation_trace = std::move(trace);
    return sol;
}

BoundarySolution solve_boundaries(const MarketParams& mp, const CostParams& cp,
                                  std::optional<BoundaryCandidate> init) {
    if (!(cp.delta() > 0.0)) {
        throw parameter_degeneracy("solve_boundaries requires delta > 0");
    }
    if (!(cp.gamma() > 0.0)) {
        throw parameter_degeneracy("solve_boundaries requires gamma > 0");
    }
    if (init) {
        if (auto sol = solve_from(mp, cp, *init)) {
            return *sol;
        }
    }

    const double start_delta =
        cp.gamma() < 1.0 - kContinuationStartDelta ? kContinuationStartDelta : cp.delta();
    const CostParams start_costs(start_delta, cp.gamma());
    std::vector<ContinuationStep> attempts;
    for (double spread : {1.0, 0.5, 2.0, 0.75, 1.5, 3.0}) {
        const BoundaryCandidate seed = heuristic_initializer(mp, start_costs, spread);
        attempts.push_back({start_delta, seed});
        if (auto start = solve_from(mp, start_costs, seed)) {
            return continue_boundaries(mp, cp.gamma(), start_delta, start->candidate, cp.delta());
        }
    }
    throw NonConvergence("solve_boundaries: no heuristic start converged at delta=" +
                             delta_text(start_delta),
                         attempts);
}

std::vector<BoundarySolution> multi_start_boundaries(const MarketParams& mp, const CostParams& cp,
                                                     int count, std::uint64_t seed) {
    const BoundarySolution ref = solve_boundaries(mp, cp);
    const BoundaryCandidate& c = ref.candidate;
    PathRng rng(seed, 0, 7);
    std::vector<BoundarySolution> out;
    for (int i = 0; i < count; ++i) {
        std::optional<BoundarySolution> sol;
        BoundaryCandidate start;
        // Each coordinate is moved by up to 25% of the local gap it borders.
        for (int attempt = 0; attempt < 50 && !sol; ++attempt) {
            const double gap_lo = c.alpha - c.a;
            const double gap_hi = c.b - c.beta;
            const double mid = c.beta - c.alpha;
            auto jitter = [&](double scale) { return (2.0 * rng.uniform() - 1.0) * 0.25 * scale; };
            start.a = c.a + jitter(gap_lo);
            start.alpha = c.alpha + jitter(std::min(gap_lo, mid));
            start.beta = c.beta + jitter(std::min(gap_hi, mid));
            start.b = c.b + jitter(gap_hi);
            start.x0 = c.x0 + jitter(mid);
            start.l = c.l + jitter(c.l * 0.02);
            if (!admissible(start.to_array())) {
                continue;
            }
            sol = solve_from(mp, cp, start);
            if (!sol) {
                throw NonConvergence("multi-start: Newton failed from a random start",
                                     {{cp.delta(), start}});
            }
        }
        if (!sol) {
            throw NonConvergence("multi-start: no admissible random start", {});
        }
        out.push_back(*sol);
    }
    return out;
}

}  // namespace gf
