#include "market_model.hpp"

#include "errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace gf;

namespace {

const MarketParams kBase(0.0, 0.096, 0.4);

}  // namespace

TEST(MarketParams, RejectsNonPositiveSigma) {
    EXPECT_THROW(MarketParams(0.0, 0.096, 0.0), Error);
    EXPECT_THROW(MarketParams(0.0, 0.096, -0.4), Error);
}

TEST(MarketParams, RejectsMertonFractionOutsideUnitInterval) {
    EXPECT_THROW(MarketParams(0.0, 0.2, 0.4), Error);
    EXPECT_THROW(MarketParams(0.05, 0.05, 0.4), Error);
    EXPECT_THROW(MarketParams(0.05, 0.01, 0.4), Error);
    try {
        MarketParams(0.0, 0.2, 0.4);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
        EXPECT_NE(std::string(e.what()).find("(mu - r)/sigma^2 < 1"), std::string::npos);
    }
}

TEST(CostParams, EnforcesRanges) {
    EXPECT_NO_THROW(CostParams(0.0, 0.0));
    EXPECT_NO_THROW(CostParams(0.01, 0.003));
    EXPECT_THROW(CostParams(-1e-3, 0.003), Error);
    EXPECT_THROW(CostParams(1.0, 0.0), Error);
    EXPECT_THROW(CostParams(0.01, -0.1), Error);
    try {
        CostParams(0.01, 0.999);
        FAIL() << "gamma >= 1 - delta accepted";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("gamma < 1 - delta"), std::string::npos);
    }
}

TEST(MertonFraction, Examples) {
    EXPECT_DOUBLE_EQ(merton_fraction(kBase), 0.6);
    EXPECT_NEAR(merton_fraction(MarketParams(0.02, 0.10, 0.4)), 0.5, 1e-15);
}

TEST(GrowthIntegrand, Examples) {
    EXPECT_EQ(growth_integrand(kBase, 0.0), 0.0);
    EXPECT_NEAR(growth_integrand(kBase, 1.0), 0.016, 1e-16);
    EXPECT_NEAR(growth_integrand(kBase, 0.6), 0.0288, 1e-16);
    EXPECT_THROW(growth_integrand(kBase, -0.01), Error);
    EXPECT_THROW(growth_integrand(kBase, 1.01), Error);
}

TEST(GrowthIntegrand, StrictlyConcaveWithMaximumAtMerton) {
    const double hh = merton_fraction(kBase);
    const double top = growth_integrand(kBase, hh);
    EXPECT_NEAR(top, 0.5 * kBase.sigma_sq() * hh * hh, 1e-16);
    for (int i = 0; i <= 1000; ++i) {
        const double h = i / 1000.0;
        if (std::abs(h - hh) > 1e-12) {
            EXPECT_LT(growth_integrand(kBase, h), top) << h;
        }
    }
    for (int i = 1; i < 100; ++i) {
        const double h = i / 100.0, e = 1e-3;
        const double second = growth_integrand(kBase, h + e) - 2 * growth_integrand(kBase, h) +
                              growth_integrand(kBase, h - e);
        EXPECT_LT(second, 0.0);
    }
}

TEST(Transform, Examples) {
    EXPECT_EQ(to_centered(0.5), 0.0);
    EXPECT_EQ(from_centered(0.0), 0.5);
    // mpmath, 40 digits: log(1.5)
    EXPECT_NEAR(to_centered(0.6), 0.40546510810816438198, 1e-15);
    EXPECT_THROW(to_centered(0.0), Error);
    EXPECT_THROW(to_centered(1.0), Error);
}

TEST(Transform, RoundTripOnFractions) {
    for (double h : {0.01, 0.37, 0.99}) {
        EXPECT_NEAR(from_centered(to_centered(h)), h, 1e-14) << h;
    }
    for (int i = 0; i <= 10000; ++i) {
        const double h = kFractionEps + (1.0 - 2.0 * kFractionEps) * i / 10000.0;
        EXPECT_NEAR(from_centered(to_centered(h)), h, 1e-14) << h;
    }
}

TEST(Transform, RoundTripOnCenteredLine) {
    for (int i = 0; i <= 6000; ++i) {
        const double y = -30.0 + 60.0 * i / 6000.0;
        const Fraction h = from_centered_fraction(y);
        EXPECT_NEAR(to_centered(h), y, 1e-14 * std::max(1.0, std::abs(y))) << y;
        EXPECT_GT(h.value(), 0.0);
        EXPECT_LT(h.value(), 1.0);
    }
}

TEST(Transform, DerivativeIdentity) {
    for (double y : {-5.0, -0.3, 0.0, 1.7, 12.0}) {
        const double e = 1e-6;
        const double fd = (from_centered(y + e) - from_centered(y - e)) / (2 * e);
        EXPECT_NEAR(from_centered_derivative(y), fd, 1e-9);
        const double p = from_centered(y);
        EXPECT_NEAR(from_centered_derivative(y), p * (1 - p), 1e-16);
    }
}

TEST(GrowthIntegrandTransformed, Examples) {
    EXPECT_NEAR(growth_integrand_transformed(kBase, to_centered(0.6)), 0.0288, 1e-15);
    EXPECT_NEAR(growth_integrand_transformed(kBase, -40.0), 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(growth_integrand_transformed(kBase, 0.0), growth_integrand(kBase, 0.5));
    for (double y : {-3.0, -1.0, 0.0, 0.3, 2.0}) {
        EXPECT_LT(growth_integrand_transformed(kBase, y), 0.0288);
    }
}

TEST(TradeCostGamma, Examples) {
    const CostParams zero(0.0, 0.003);
    for (double x : {0.1, 0.5, 0.9}) {
        EXPECT_EQ(trade_cost_gamma(zero, x, x), 0.0);
    }
    const CostParams cp(0.01, 0.003);
    // mpmath: log(0.9885/0.9985)
    EXPECT_NEAR(trade_cost_gamma(cp, 0.5, 0.5), -0.010065510245198305221, 1e-15);
}

TEST(TradeCostGamma, BranchJumpAtDiagonal) {
    const CostParams cp(0.01, 0.003);
    const double x = 0.5, eps = 1e-9;
    const double jump = trade_cost_gamma(cp, x, x + eps) - trade_cost_gamma(cp, x, x - eps);
    // mpmath at eps = 1e-9 and the eps -> 0 limit
    EXPECT_NEAR(jump, 3.0303099185029152184e-05, 1e-14);
    EXPECT_NEAR(jump, 3.0303099176029131934e-05, 1e-13);
}

TEST(TradeCostGamma, NonPositiveAndRejectsBadArguments) {
    const CostParams cp(0.01, 0.003);
    for (int i = 1; i < 50; ++i)
        for (int j = 1; j < 50; ++j) EXPECT_LE(trade_cost_gamma(cp, i / 50.0, j / 50.0), 0.0);
    const CostParams huge(0.5, 0.49);
    EXPECT_THROW(trade_cost_gamma(huge, 1.5, 0.2), Error);
}

TEST(TradeCostGamma, PartialDerivativesMatchFiniteDifferences) {
    const CostParams cp(0.01, 0.003);
    const double e = 1e-6;
    for (auto [x, y] : std::vector<std::pair<double, double>>{{0.3, 0.6}, {0.8, 0.55}}) {
        EXPECT_NEAR(trade_cost_gamma_dx(cp, x, y),
                    (trade_cost_gamma(cp, x + e, y) - trade_cost_gamma(cp, x - e, y)) / (2 * e), 1e-9);
        EXPECT_NEAR(trade_cost_gamma_dy(cp, x, y),
                    (trade_cost_gamma(cp, x, y + e) - trade_cost_gamma(cp, x, y - e)) / (2 * e), 1e-9);
    }
}

TEST(WealthFactor, Examples) {
    const CostParams no_prop(0.02, 0.0);
    for (double h : {0.0, 0.3, 1.0})
        for (double xi : {0.0, 0.5, 1.0}) EXPECT_DOUBLE_EQ(wealth_factor(no_prop, h, xi), 0.98);
    // mpmath: 1.0005/1.0018
    EXPECT_NEAR(wealth_factor(CostParams(0.001, 0.003), 0.5, 0.6), 0.99870233579556797764, 1e-15);
}

TEST(WealthFactor, BranchSeamEqualsOneMinusDelta) {
    for (double d : {0.02, 0.001, 0.3})
        for (double g : {0.003, 0.05})
            for (double h : {0.1, 0.4, 0.6}) {
                const CostParams cp(d, g);
                const double seam = h / (1 - d);
                if (seam > 1.0) continue;
                EXPECT_NEAR(wealth_factor(cp, h, seam), 1 - d, 1e-15);
                const double upper = (1 - d + g * h) / (1 + g * seam);
                const double lower = (1 - d - g * h) / (1 - g * seam);
                EXPECT_NEAR(upper, 1 - d, 1e-15);
                EXPECT_NEAR(lower, 1 - d, 1e-15);
            }
}

TEST(WealthFactor, InUnitIntervalAndOneOnlyForFreeNoTrade) {
    for (auto [d, g] : std::vector<std::pair<double, double>>{{0.0, 0.003}, {0.01, 0.003}, {0.1, 0.5}, {0.0, 0.0}}) {
        const CostParams cp(d, g);
        for (int i = 0; i <= 40; ++i)
            for (int j = 0; j <= 40; ++j) {
                const double h = i / 40.0, xi = j / 40.0;
                const double w = wealth_factor(cp, h, xi);
                EXPECT_GT(w, 0.0);
                EXPECT_LE(w, 1.0);
                if (w == 1.0) {
                    EXPECT_EQ(d, 0.0);
                    EXPECT_TRUE(xi == h || g == 0.0);
                }
            }
    }
}

TEST(TradeCostTransformed, Examples) {
    EXPECT_EQ(trade_cost_transformed(CostParams(0.0, 0.003), 0.7, 0.0), 0.0);
    const CostParams cp(0.01, 0.003);
    EXPECT_NEAR(trade_cost_transformed(cp, 0.2, -0.5),
                std::log(wealth_factor(cp, from_centered(0.2), from_centered(-0.3))), 1e-12);
    // mpmath
    EXPECT_NEAR(trade_cost_transformed(cp, 0.2, -0.5), -0.01044040098596675032, 1e-14);
    EXPECT_NEAR(trade_cost_transformed(CostParams(0.001, 0.003), 0.0, std::log(1.5)), -0.001298506899728325562,
                1e-14);
}

TEST(TradeCostTransformed, AgreesWithLogWealthFactorOnGrid) {
    for (auto [d, g] : std::vector<std::pair<double, double>>{{0.0, 0.003}, {0.01, 0.003}, {1e-6, 0.2}}) {
        const CostParams cp(d, g);
        for (int i = 0; i <= 40; ++i)
            for (int j = 0; j <= 40; ++j) {
                const double y = -6.0 + 12.0 * i / 40.0;
                const double z = -4.0 + 8.0 * j / 40.0;
                EXPECT_NEAR(trade_cost_transformed(cp, y, z),
                            std::log(wealth_factor(cp, from_centered(y), from_centered(y + z))), 1e-12);
            }
    }
}

TEST(Generator, Examples) {
    EXPECT_EQ(apply_generator(kBase, 0.0, 3.0, -7.0, 0.0), 0.0);
    EXPECT_EQ(apply_generator(kBase, 0.0, 3.0, -7.0, 1.0), 0.0);
    EXPECT_EQ(apply_generator(kBase, 1.0, 0.0, 0.0, 0.4), 0.0);
    EXPECT_NEAR(apply_generator(kBase, 0.6, 1.0, 0.0, 0.6), 0.0, 1e-16);
}

TEST(Generator, FirstOrderTermVanishesAtMerton) {
    for (auto mp : {kBase, MarketParams(0.01, 0.05, 0.3), MarketParams(0.02, 0.10, 0.4)}) {
        const double hh = merton_fraction(mp);
        EXPECT_NEAR(apply_generator(mp, 0.0, 1.0, 0.0, hh), 0.0, 1e-17);
    }
}

TEST(GeneratorTransformed, Examples) {
    EXPECT_EQ(apply_generator_transformed(kBase, 0.0, 0.0), 0.0);
    const MarketParams half(0.02, 0.10, 0.4);
    EXPECT_NEAR(apply_generator_transformed(half, 1.0, 0.0), 0.0, 1e-16);
    EXPECT_NEAR(apply_generator_transformed(kBase, 1.0, 0.0), 0.016, 1e-16);
    EXPECT_NEAR(apply_generator_transformed(kBase, 0.0, 1.0), 0.08, 1e-16);
}

TEST(GeneratorTransformed, ChainRuleConsistency) {
    // u(x) = sin(3x) + x^2; (u o phi)' = u' phi', (u o phi)'' = u'' phi'^2 + u' phi''.
    auto u1 = [](double x) { return 3 * std::cos(3 * x) + 2 * x; };
    auto u2 = [](double x) { return -9 * std::sin(3 * x) + 2; };
    auto w = [](double y) { return std::sin(3 * from_centered(y)) + std::pow(from_centered(y), 2); };
    for (double y : {0.3, -1.2, 2.0}) {
        const double e = 1e-4;
        const double dw = (w(y + e) - w(y - e)) / (2 * e);
        const double ddw = (w(y + e) - 2 * w(y) + w(y - e)) / (e * e);
        const double x = from_centered(y);
        EXPECT_NEAR(apply_generator_transformed(kBase, dw, ddw), apply_generator(kBase, 0.0, u1(x), u2(x), x),
                    1e-6)
            << y;
    }
}
