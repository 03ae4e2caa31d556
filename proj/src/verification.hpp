#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gf {

/// Grid verification of a QVI (impulse model) or HJB (limit model) solution.
/// Violations are reported, never thrown.
struct VerificationReport {
    std::size_t grid_n = 0;
    double tol = 0.0;
    /// max |D u + f - l| inside the continuation region.
    double max_interior_residual = 0.0;
    double worst_interior_x = 0.0;
    /// max positive part of D u + f - l outside the continuation region.
    double max_exterior_excess = 0.0;
    double worst_exterior_x = 0.0;
    /// Impulse model: max of M u - u. Limit model: max gradient-constraint violation.
    double max_intervention_excess = 0.0;
    double worst_intervention_x = 0.0;
    /// Impulse model: |M u - u| at a and b. Limit model: gradient equality gap outside (A, B).
    double boundary_equality_gap = 0.0;
    /// Impulse model: argmax targets of M u at a and b.
    double target_at_lower = 0.0;
    double target_at_upper = 0.0;
    /// C1 (impulse) or C2 (limit) mismatch at the free boundaries.
    double pasting_mismatch = 0.0;
    /// Limit model: min of gamma/(1+gamma x) - v'(x) over (A, 1 - eps]; 0 for the impulse model.
    double strict_margin = 0.0;
    std::vector<std::string> failures;

    bool passed() const noexcept { return failures.empty(); }
};

}  // namespace gf
