#include "path_simulator.hpp"

#include "convergence_lab.hpp"
#include "path_rng.hpp"
#include "proportional_limit_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

using namespace gf;

namespace {

const MarketParams kBase(0.0, 0.096, 0.4);
constexpr double kGamma = 0.003;
const CostParams kCosts(1e-3, kGamma);

const BoundaryCandidate& optimum() {
    static const BoundaryCandidate c = solve_boundaries(kBase, kCosts).candidate;
    return c;
}

const LimitCandidate& limit() {
    static const LimitCandidate c = solve_limit(kBase, kGamma).candidate;
    return c;
}

SimConfig short_config(double horizon = 20.0, std::uint64_t paths = 20) {
    SimConfig cfg;
    cfg.horizon = horizon;
    cfg.dt = 1e-3;
    cfg.n_paths = paths;
    cfg.base_seed = 99;
    return cfg;
}

bool same_bits(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }

}  // namespace

TEST(SimConfig, Validation) {
    SimConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.n_steps(), 200000u);
    cfg.dt = 3.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = SimConfig{};
    cfg.horizon = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = SimConfig{};
    cfg.v0 = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = SimConfig{};
    cfg.substeps = 0;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(ImpulsePath, Deterministic) {
    SimConfig cfg = short_config();
    cfg.record_stride = 100;
    const PathRecord p = simulate_impulse_path(kBase, kCosts, optimum(), cfg, 3);
    const PathRecord q = simulate_impulse_path(kBase, kCosts, optimum(), cfg, 3);
    ASSERT_EQ(p.samples.size(), q.samples.size());
    ASSERT_EQ(p.trades.size(), q.trades.size());
    EXPECT_TRUE(same_bits(p.log_wealth_terminal, q.log_wealth_terminal));
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
        EXPECT_TRUE(same_bits(p.samples[i].h, q.samples[i].h));
        EXPECT_TRUE(same_bits(p.samples[i].wealth, q.samples[i].wealth));
    }
    for (std::size_t i = 0; i < p.trades.size(); ++i) EXPECT_TRUE(same_bits(p.trades[i].factor, q.trades[i].factor));
    const PathRecord other = simulate_impulse_path(kBase, kCosts, optimum(), cfg, 4);
    EXPECT_FALSE(same_bits(p.log_wealth_terminal, other.log_wealth_terminal));
}

TEST(ImpulsePath, WideBoundariesReproduceBuyAndHold) {
    const BoundaryCandidate wide{0.02, 0.5, 1e-6, 0.55, 0.6, 1 - 1e-6};
    SimConfig cfg = short_config(1.0);
    cfg.h0 = 0.55;
    const MarketParams mp(0.03, 0.126, 0.4);
    const PathRecord p = simulate_impulse_path(mp, kCosts, wide, cfg, 0);
    EXPECT_TRUE(p.trades.empty());
    PathRng rng(cfg.base_seed, 0, 0);
    double z = 0.0;
    for (std::size_t i = 0; i < cfg.n_steps(); ++i) z += rng.normal();
    const double T = cfg.horizon;
    const double stock = 0.55 * std::exp((mp.mu() - 0.5 * mp.sigma_sq()) * T + mp.sigma() * std::sqrt(cfg.dt) * z);
    const double bond = 0.45 * std::exp(mp.r() * T);
    EXPECT_NEAR(p.log_wealth_terminal, std::log(stock + bond), 1e-10);
}

TEST(ImpulsePath, TradesLandOnTargetsWithExactFactor) {
    SimConfig cfg = short_config(50.0);
    const PathRecord p = simulate_impulse_path(kBase, kCosts, optimum(), cfg, 1);
    ASSERT_FALSE(p.trades.empty());
    const BoundaryCandidate& c = optimum();
    for (const TradeEvent& t : p.trades) {
        EXPECT_TRUE(t.target == c.alpha || t.target == c.beta);
        EXPECT_EQ(t.factor, wealth_factor(kCosts, t.pre_fraction, t.target));
        EXPECT_TRUE(t.pre_fraction <= c.a || t.pre_fraction >= c.b);
        EXPECT_EQ(t.target == c.alpha, t.pre_fraction <= c.a);
    }
    for (const PathSample& s : p.samples) {
        if (s.event == PathEvent::TradeLow) EXPECT_NEAR(s.h, c.alpha, 1e-12);
        if (s.event == PathEvent::TradeHigh) EXPECT_NEAR(s.h, c.beta, 1e-12);
        EXPECT_GT(s.wealth, 0.0);
    }
}

TEST(ImpulsePath, AccountingIdentity) {
    SimConfig cfg = short_config(50.0);
    for (std::uint64_t i = 0; i < 5; ++i) {
        const PathRecord p = simulate_impulse_path(kBase, kCosts, optimum(), cfg, i);
        EXPECT_NEAR(p.log_wealth_terminal, p.log_v0 + p.step_log_sum + p.trade_log_sum, 1e-10);
        EXPECT_NEAR(p.growth, (p.log_wealth_terminal - p.log_v0) / cfg.horizon, 1e-15);
    }
}

TEST(ImpulsePath, GrowthRepresentationMatchesDirectAccounting) {
    SimConfig cfg = short_config(50.0);
    cfg.record_stride = 1;
    const PathRecord p = simulate_impulse_path(kBase, kCosts, optimum(), cfg, 2);
    ASSERT_EQ(p.samples.size(), cfg.n_steps() + 1);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < p.samples.size(); ++i) {
        integral += growth_integrand(kBase, p.samples[i].h) * cfg.dt;
    }
    const double represented = kBase.r() + (integral + p.trade_log_sum + p.martingale_sum) / cfg.horizon;
    EXPECT_NEAR(p.growth, represented, 5e-4);
}

TEST(ImpulsePath, TransformedDriftBetweenTrades) {
    SimConfig cfg = short_config(100.0);
    cfg.record_stride = 1;
    const PathRecord p = simulate_impulse_path(kBase, kCosts, optimum(), cfg, 5);
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 1; i < p.samples.size(); ++i) {
        const double inc = (to_centered(p.samples[i].pre_h) - to_centered(p.samples[i - 1].h)) / cfg.dt;
        sum += inc;
        sum_sq += inc * inc;
        ++n;
    }
    ASSERT_GE(n, 100000u);
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, kBase.centered_drift(), 3 * se);
}

TEST(ImpulsePath, RejectsStartOutsideRegion) {
    SimConfig cfg = short_config();
    cfg.h0 = optimum().b + 0.01;
    EXPECT_THROW(simulate_impulse_path(kBase, kCosts, optimum(), cfg, 0), Error);
    BoundaryCandidate bad = optimum();
    std::swap(bad.a, bad.b);
    EXPECT_THROW(simulate_impulse_path(kBase, kCosts, bad, short_config(), 0), Error);
}

TEST(EstimateGrowthImpulse, AggregatesPerPathGrowth) {
    const SimConfig cfg = short_config(10.0, 16);
    const GrowthEstimate e = estimate_growth_impulse(kBase, kCosts, optimum(), cfg);
    double s = 0.0, ss = 0.0;
    for (std::uint64_t i = 0; i < cfg.n_paths; ++i) {
        const double g = simulate_impulse_path(kBase, kCosts, optimum(), cfg, i).growth;
        s += g;
        ss += g * g;
    }
    const double n = static_cast<double>(cfg.n_paths);
    const double mean = s / n;
    EXPECT_NEAR(e.mean, mean, 1e-15);
    EXPECT_NEAR(e.std_error, std::sqrt((ss - n * mean * mean) / (n - 1) / n), 1e-12);
    EXPECT_EQ(e.n_paths, cfg.n_paths);
    EXPECT_EQ(e.horizon, cfg.horizon);
    const GrowthEstimate again = estimate_growth_impulse(kBase, kCosts, optimum(), cfg);
    EXPECT_TRUE(same_bits(e.mean, again.mean));
    EXPECT_TRUE(same_bits(e.compensated_mean, again.compensated_mean));
}

TEST(EstimateGrowthImpulse, CompensatedEstimateSharesExpectation) {
    const SimConfig cfg = short_config(50.0, 64);
    const GrowthEstimate e = estimate_growth_impulse(kBase, kCosts, optimum(), cfg);
    EXPECT_LT(e.compensated_std_error, e.std_error);
    EXPECT_NEAR(e.compensated_mean, e.mean, 3 * std::hypot(e.std_error, e.compensated_std_error));
}

TEST(EstimateGrowthImpulse, SuboptimalBoundariesDoNotWin) {
    const SimConfig cfg = short_config(50.0, 64);
    BoundaryCandidate shifted = optimum();
    shifted.a += 0.05;
    shifted.alpha += 0.05;
    shifted.beta += 0.05;
    shifted.b += 0.05;
    SimConfig cfg_s = cfg;
    cfg_s.h0 = 0.6;
    SimConfig cfg_o = cfg;
    cfg_o.h0 = 0.6;
    const GrowthEstimate opt = estimate_growth_impulse(kBase, kCosts, optimum(), cfg_o);
    const GrowthEstimate sub = estimate_growth_impulse(kBase, kCosts, shifted, cfg_s);
    EXPECT_LE(sub.mean, opt.mean + 3 * std::hypot(opt.std_error, sub.std_error));
}

TEST(EstimateGrowthImpulse, BridgeCorrectionRaisesCoarseTradeRate) {
    SimConfig cfg = short_config(100.0, 32);
    cfg.dt = 1e-2;
    const GrowthEstimate plain = estimate_growth_impulse(kBase, kCosts, optimum(), cfg);
    cfg.bridge_correction = true;
    const GrowthEstimate bridged = estimate_growth_impulse(kBase, kCosts, optimum(), cfg);
    const RenewalBreakdown rb = evaluate_policy_renewal_detail(kBase, kCosts, optimum());
    const double exact_rate =
        1.0 / (rb.weight_alpha * rb.from_alpha.expected_time + rb.weight_beta * rb.from_beta.expected_time);
    EXPECT_GT(bridged.trade_rate, plain.trade_rate);
    EXPECT_LT(std::abs(bridged.trade_rate - exact_rate), std::abs(plain.trade_rate - exact_rate));
}

TEST(ReflectedPath, ContainmentAndOneSidedAction) {
    SimConfig cfg = short_config(20.0);
    cfg.record_stride = 1;
    const ReflectedRecord p = simulate_reflected_path(kBase, kGamma, limit().A, limit().B, cfg, 0);
    std::size_t lower = 0, upper = 0;
    for (const PathSample& s : p.samples) {
        EXPECT_GE(s.h, limit().A - 1e-12);
        EXPECT_LE(s.h, limit().B + 1e-12);
        if (s.event == PathEvent::ReflectLow) {
            ++lower;
            EXPECT_LT(s.pre_h, limit().A);
            EXPECT_NEAR(s.h, limit().A, 1e-12);
        } else if (s.event == PathEvent::ReflectHigh) {
            ++upper;
            EXPECT_GT(s.pre_h, limit().B);
            EXPECT_NEAR(s.h, limit().B, 1e-12);
        } else {
            EXPECT_GE(s.pre_h, limit().A);
            EXPECT_LE(s.pre_h, limit().B);
        }
        EXPECT_GT(s.wealth, 0.0);
    }
    EXPECT_EQ(lower, p.lower_projections);
    EXPECT_EQ(upper, p.upper_projections);
    EXPECT_EQ(p.buy_volume > 0.0, lower > 0);
    EXPECT_EQ(p.sell_volume > 0.0, upper > 0);
}

TEST(ReflectedPath, ProjectionRestoresBoundaryFraction) {
    const double A = 0.5, B = 0.6, g = 0.01;
    const double v = 1.0, y_hi = 0.65, y_lo = 0.42;
    const double m = (y_hi - B * v) / (1 - g * B);
    EXPECT_NEAR((y_hi - m) / (v - g * m), B, 1e-15);
    const double l = (A * v - y_lo) / (1 + g * A);
    EXPECT_NEAR((y_lo + l) / (v - g * l), A, 1e-15);
}

TEST(ReflectedPath, BothThroughputsPositiveOverLongHorizon) {
    const SimConfig cfg = short_config(200.0, 4);
    const GrowthEstimate e = estimate_growth_reflected(kBase, kGamma, limit().A, limit().B, cfg);
    EXPECT_GT(e.buy_rate, 0.0);
    EXPECT_GT(e.sell_rate, 0.0);
}

TEST(ReflectedPath, DeterministicAndRejectsBadStart) {
    SimConfig cfg = short_config(5.0);
    const ReflectedRecord p = simulate_reflected_path(kBase, kGamma, limit().A, limit().B, cfg, 7);
    const ReflectedRecord q = simulate_reflected_path(kBase, kGamma, limit().A, limit().B, cfg, 7);
    EXPECT_TRUE(same_bits(p.log_wealth_terminal, q.log_wealth_terminal));
    EXPECT_TRUE(same_bits(p.buy_volume, q.buy_volume));
    cfg.h0 = limit().A - 0.01;
    EXPECT_THROW(simulate_reflected_path(kBase, kGamma, limit().A, limit().B, cfg, 0), Error);
}

TEST(ReflectedPath, SubstepsShareBrownianIncrements) {
    SimConfig fine = short_config(2.0);
    SimConfig coarse = fine;
    coarse.dt = 4 * fine.dt;
    coarse.substeps = 4;
    const double A = 1e-6, B = 1 - 1e-6;
    const ReflectedRecord f = simulate_reflected_path(kBase, kGamma, A, B, fine, 3);
    const ReflectedRecord c = simulate_reflected_path(kBase, kGamma, A, B, coarse, 3);
    EXPECT_NEAR(f.log_wealth_terminal, c.log_wealth_terminal, 1e-12);
}

TEST(CoupleTransformed, IdenticalDynamicsGiveZeroDistance) {
    const double lo = to_centered(limit().A), hi = to_centered(limit().B);
    const TransformedLevels same{lo, lo, hi, hi};
    const CoupledOutcome o = couple_transformed(kBase, same, lo, hi, 0.4, short_config(5.0), 0);
    EXPECT_EQ(o.sup_distance, 0.0);
}

TEST(CouplePaths, JumpSeparatesPaths) {
    SimConfig cfg = short_config(10.0, 20);
    const CouplingTable t = couple_paths(kBase, kGamma, {1e-2}, cfg);
    ASSERT_EQ(t.rows.size(), 1u);
    const CouplingRow& row = t.rows[0];
    for (std::size_t i = 0; i < row.sup_per_path.size(); ++i) {
        if (row.trades_per_path[i] > 0) EXPECT_GE(row.sup_per_path[i], 0.5 * row.min_jump);
    }
}

TEST(CouplePaths, RejectsUnsortedDeltas) {
    EXPECT_THROW(couple_paths(kBase, kGamma, {1e-3, 1e-2}, short_config()), Error);
    EXPECT_THROW(couple_paths(kBase, kGamma, {}, short_config()), Error);
}

TEST(EventName, Strings) {
    EXPECT_EQ(event_name(PathEvent::None), "");
    EXPECT_EQ(event_name(PathEvent::TradeLow), "trade_lo");
    EXPECT_EQ(event_name(PathEvent::TradeHigh), "trade_hi");
    EXPECT_EQ(event_name(PathEvent::ReflectLow), "reflect_lo");
    EXPECT_EQ(event_name(PathEvent::ReflectHigh), "reflect_hi");
}
