#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>

namespace gf {

struct NewtonOptions {
    double residual_tol = 1e-10;
    double step_tol = 1e-14;
    double fd_rel_step = 1e-7;
    int max_iterations = 100;
    int max_halvings = 50;
};

template <std::size_t N>
struct NewtonResult {
    std::array<double, N> x{};
    std::array<double, N> residual{};
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

template <std::size_t N>
double max_norm(const std::array<double, N>& v) {
    double m = 0.0;
    for (double e : v) {
        m = std::max(m, std::abs(e));
    }
    return std::isfinite(m) ? m : HUGE_VAL;
}

/// Damped Newton with a forward-difference Jacobian. A trial point is accepted
/// when it is admissible, its residual evaluates, and the max-norm decreases;
/// otherwise the step is halved.
template <std::size_t N, class Residual, class Admissible>
NewtonResult<N> damped_newton(Residual&& residual, std::array<double, N> x,
                              Admissible&& admissible, const NewtonOptions& opt = {}) {
    using Vec = Eigen::Matrix<double, static_cast<int>(N), 1>;
    using Mat = Eigen::Matrix<double, static_cast<int>(N), static_cast<int>(N)>;

    auto try_eval = [&](const std::array<double, N>& p, std::array<double, N>& out) {
        try {
            out = residual(p);
        } catch (const std::exception&) {
            return false;
        }
        return max_norm(out) < HUGE_VAL;
    };

    NewtonResult<N> res;
    res.x = x;
    if (!admissible(x) || !try_eval(x, res.residual)) {
        res.residual_norm = HUGE_VAL;
        return res;
    }
    res.residual_norm = max_norm(res.residual);

    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it;
        if (res.residual_norm <= opt.residual_tol) {
            res.converged = true;
            return res;
        }
        Mat jac;
        for (std::size_t j = 0; j < N; ++j) {
            std::array<double, N> xp = res.x;
            const double h = opt.fd_rel_step * std::max(1.0, std::abs(xp[j]));
            xp[j] += h;
            std::array<double, N> fp{};
            if (!try_eval(xp, fp)) {
                xp[j] = res.x[j] - h;
                if (!try_eval(xp, fp)) {
                    return res;
                }
                for (std::size_t i = 0; i < N; ++i) jac(i, j) = (res.residual[i] - fp[i]) / h;
                continue;
            }
            for (std::size_t i = 0; i < N; ++i) jac(i, j) = (fp[i] - res.residual[i]) / h;
        }
        Vec rhs;
        for (std::size_t i = 0; i < N; ++i) rhs(i) = -res.residual[i];
        const Vec dx = jac.fullPivLu().solve(rhs);
        if (!dx.allFinite()) {
            return res;
        }

        double t = 1.0;
        bool accepted = false;
        std::array<double, N> trial{};
        std::array<double, N> trial_res{};
        for (int k = 0; k <= opt.max_halvings; ++k, t *= 0.5) {
            for (std::size_t i = 0; i < N; ++i) trial[i] = res.x[i] + t * dx(i);
            if (admissible(trial) && try_eval(trial, trial_res) &&
                max_norm(trial_res) < res.residual_norm) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            return res;
        }
        const double step = t * dx.cwiseAbs().maxCoeff();
        res.x = trial;
        res.residual = trial_res;
        res.residual_norm = max_norm(trial_res);
        if (step <= opt.step_tol) {
            res.iterations = it + 1;
            res.converged = res.residual_norm <= opt.residual_tol;
            return res;
        }
    }
    res.iterations = opt.max_iterations;
    res.converged = res.residual_norm <= opt.residual_tol;
    return res;
}

}  // namespace gf
