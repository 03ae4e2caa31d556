#pragma once

#include <functional>

namespace gf {

/// Exit statistics of X_t = y + c t + sigma W_t from an interval (lo, hi).
///
/// The scale function is normalized to s(lo) = 0 with density exp(-kappa (z - lo)),
/// kappa = 2c / sigma^2, and the speed density is 2 / (sigma^2 s'(z)).
class DriftedBrownianExit {
public:
    DriftedBrownianExit(double drift, double sigma, double lo, double hi);

    double scale(double y) const;
    /// P(X hits hi before lo | X_0 = y).
    double upper_exit_probability(double y) const;
    /// E[tau] for tau the first exit time from (lo, hi).
    double expected_exit_time(double y) const;
    /// E[int_0^tau f(X_s) ds], i.e. the solution of
    /// (sigma^2/2) w'' + c w' = -f with w(lo) = w(hi) = 0.
    double expected_occupation_integral(const std::function<double(double)>& f, double y,
                                        double abs_tol = 1e-12) const;

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:

    double drift_;
    double sigma_sq_;
    double kappa_;
    double lo_;
    double hi_;
    double s_hi_;
};

}  // namespace gf
