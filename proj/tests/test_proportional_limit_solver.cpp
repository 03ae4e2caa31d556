#include "proportional_limit_solver.hpp"

#include "qvi_boundary_solver.hpp"
#include "slope_function.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace gf;

namespace {

const MarketParams kBase(0.0, 0.096, 0.4);
constexpr double kGamma = 0.003;

const LimitSolution& solved() {
    static const LimitSolution sol = solve_limit(kBase, kGamma);
    return sol;
}

double max_abs(const std::array<double, 4>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(SolveLimit, ConvergedRoot) {
    EXPECT_LE(solved().residual_norm, 1e-10);
    EXPECT_LE(max_abs(residual_system_limit(kBase, kGamma, solved().candidate)), 1e-10);
}

TEST(SolveLimit, MatchesHighPrecisionOracle) {
    // mpmath findroot at 40 digits.
    const LimitCandidate& c = solved().candidate;
    EXPECT_NEAR(c.l0, 0.028479493119886029, 1e-12);
    EXPECT_NEAR(c.x0, 0.60163538558325668, 1e-9);
    EXPECT_NEAR(c.A, 0.53595945311976574, 1e-9);
    EXPECT_NEAR(c.B, 0.66396630495406107, 1e-9);
}

TEST(SolveLimit, OrderingAndBounds) {
    const LimitCandidate& c = solved().candidate;
    EXPECT_LT(0.0, c.A);
    EXPECT_LT(c.A, c.x0);
    EXPECT_LT(c.x0, c.B);
    EXPECT_LT(c.B, 1.0);
    EXPECT_GT(c.l0, 0.016);
    EXPECT_LT(c.l0, 0.0288);
}

TEST(SolveLimit, DominatesFixedCostGrowth) {
    for (double d : {1e-2, 1e-4}) {
        EXPECT_GT(solved().candidate.l0, solve_boundaries(kBase, CostParams(d, kGamma)).candidate.l);
    }
}

TEST(SolveLimit, MultiStartAgreement) {
    const auto sols = multi_start_limit(kBase, kGamma, 5, 77);
    ASSERT_EQ(sols.size(), 5u);
    const auto ref = solved().candidate.to_array();
    for (const auto& s : sols) {
        const auto v = s.candidate.to_array();
        for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(v[k], ref[k], 1e-8);
    }
}

TEST(SolveLimit, RejectsZeroGamma) {
    try {
        solve_limit(kBase, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParameterDegeneracy);
    }
}

TEST(SolveLimit, OtherMarkets) {
    for (const auto& mp : {MarketParams(0.02, 0.10, 0.4), MarketParams(0.01, 0.05, 0.3)}) {
        const LimitSolution s = solve_limit(mp, 0.01);
        EXPECT_LE(s.residual_norm, 1e-10);
        EXPECT_LT(s.candidate.A, merton_fraction(mp) + 0.05);
        EXPECT_GT(s.candidate.B, s.candidate.A);
    }
}

TEST(ResidualSystemLimit, PerturbingBBreaksRoot) {
    LimitCandidate c = solved().candidate;
    c.B += 1e-3;
    const auto r = residual_system_limit(kBase, kGamma, c);
    EXPECT_GT(std::abs(r[1]) + std::abs(r[3]), 1e-6);
}

TEST(ResidualSystemLimit, SmallDeltaBoundariesNearlySolve) {
    const BoundaryCandidate c = solve_boundaries(kBase, CostParams(1e-6, kGamma)).candidate;
    const LimitCandidate mid{c.l, c.x0, 0.5 * (c.a + c.alpha), 0.5 * (c.beta + c.b)};
    EXPECT_LT(max_abs(residual_system_limit(kBase, kGamma, mid)), 1e-2);
}

TEST(LimitValueFunction, SecondOrderPasting) {
    const LimitValueFunction v(kBase, kGamma, solved().candidate);
    EXPECT_LE(v.c2_mismatch(), 1e-6);
    const LimitCandidate& c = solved().candidate;
    const double e = 1e-9;
    for (double k : {c.A, c.B}) {
        EXPECT_NEAR(v.second_derivative(k - e), v.second_derivative(k + e), 1e-6);
        EXPECT_NEAR(v.derivative(k - e), v.derivative(k + e), 1e-8);
        EXPECT_NEAR(v.value(k - e), v.value(k + e), 1e-8);
    }
}

TEST(VerifyHjbLimit, Passes) {
    const VerificationReport rep = verify_hjb_limit(kBase, kGamma, solved(), 2001, 1e-6);
    EXPECT_TRUE(rep.passed()) << (rep.failures.empty() ? "" : rep.failures.front());
    EXPECT_GT(rep.strict_margin, 0.0);
}

TEST(VerifyHjbLimit, StrictBuyConstraintAboveA) {
    const LimitValueFunction v(kBase, kGamma, solved().candidate);
    const double A = solved().candidate.A;
    for (int i = 1; i <= 500; ++i) {
        const double x = A + (1.0 - kFractionEps - A) * i / 500.0;
        EXPECT_LT(v.derivative(x), kGamma / (1 + kGamma * x)) << x;
    }
}

TEST(VerifyHjbLimit, CorruptedGrowthExcessFails) {
    const VerificationReport rep =
        verify_hjb_limit(kBase, kGamma, solved(), 2001, 1e-6, solved().candidate.l0 + 1e-4);
    EXPECT_FALSE(rep.passed());
    EXPECT_GT(rep.max_interior_residual, 5e-5);
}

TEST(VerifyHjbLimit, CorruptedBoundaryFails) {
    LimitSolution s = solved();
    s.candidate.B += 1e-3;
    EXPECT_FALSE(verify_hjb_limit(kBase, kGamma, s, 2001, 1e-6).passed());
}

TEST(MultiStartLimit, WideStartsAllReachTheSameRoot) {
    // Wide random starts often converge to the same slope with an anchor
    // outside [A, B]; those roots are re-anchored inside.
    const auto sols = multi_start_limit(kBase, kGamma, 60, 5);
    ASSERT_EQ(sols.size(), 60u);
    for (const LimitSolution& s : sols) {
        EXPECT_NEAR(s.candidate.x0, solved().candidate.x0, 1e-8);
        EXPECT_NEAR(s.candidate.A, solved().candidate.A, 1e-8);
        EXPECT_NEAR(s.candidate.B, solved().candidate.B, 1e-8);
    }
}
