#include "path_simulator.hpp"

#include "errors.hpp"
#include "parallel.hpp"
#include "path_rng.hpp"
#include "proportional_limit_solver.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

namespace {

class StepNoise {
public:
    StepNoise(const SimConfig& cfg, std::uint64_t path_index)
        : rng_(cfg.base_seed, path_index, 0),
          k_(cfg.substeps),
          scale_(1.0 / std::sqrt(static_cast<double>(cfg.substeps))) {}

    double next() {
        if (k_ == 1) {
            return rng_.normal();
        }
        double s = 0.0;
        for (unsigned j = 0; j < k_; ++j) s += rng_.normal();
        return s * scale_;
    }

private:
    PathRng rng_;
    unsigned k_;
    double scale_;
};

struct Stats {
    double mean = 0.0;
    double se = 0.0;
};

Stats mean_and_se(const std::vector<double>& v) {
    Stats s;
    const double n = static_cast<double>(v.size());
    for (double x : v) s.mean += x;
    s.mean /= n;
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return s;
}

double default_h0(const MarketParams& mp, double lo, double hi) {
    const double h = merton_fraction(mp);
    if (h > lo && h < hi) {
        return h;
    }
    return 0.5 * (lo + hi);
}

bool keep_sample(const SimConfig& cfg, std::size_t step, PathEvent e) {
    return e != PathEvent::None || (cfg.record_stride > 0 && step % cfg.record_stride == 0);
}

template <bool Record>
PathRecord impulse_kernel(const MarketParams& mp, const CostParams& cp, const BoundaryCandidate& c,
                          const SimConfig& cfg, std::uint64_t path_index) {
    const double h0 = cfg.h0.value_or(default_h0(mp, c.a, c.b));
    if (!(h0 > c.a && h0 < c.b)) {
        throw invalid_argument("simulate_impulse_path: h0 must lie in (a, b)");
    }
    const std::size_t n = cfg.n_steps();
    const double dt = cfg.dt;
    const double bond_growth = std::exp(mp.r() * dt);
    const double stock_drift = (mp.mu() - 0.5 * mp.sigma_sq()) * dt;
    const double vol = mp.sigma() * std::sqrt(dt);
    const double psi_a = to_centered(c.a);
    const double psi_b = to_centered(c.b);
    const double bridge_scale = -2.0 / (mp.sigma_sq() * dt);

    StepNoise noise(cfg, path_index);
    PathRng side(cfg.base_seed, path_index, 1);

    PathRecord rec;
    rec.log_v0 = std::log(cfg.v0);
    double bond = cfg.v0 * (1.0 - h0);
    double stock = cfg.v0 * h0;
    if constexpr (Record) {
        rec.samples.push_back({0.0, h0, cfg.v0, PathEvent::None, h0});
    }
    for (std::size_t i = 1; i <= n; ++i) {
        const double v_pre = bond + stock;
        const double h_pre = stock / v_pre;
        const double z = noise.next();
        rec.martingale_sum += vol * h_pre * z;
        bond *= bond_growth;
        stock *= std::exp(stock_drift + vol * z);
        double v = bond + stock;
        const double h = stock / v;
        if constexpr (Record) {
            rec.step_log_sum += std::log(v / v_pre);
        }

        PathEvent event = PathEvent::None;
        if (h <= c.a) {
            event = PathEvent::TradeLow;
        } else if (h >= c.b) {
            event = PathEvent::TradeHigh;
        } else if (cfg.bridge_correction) {
            const double y0 = to_centered(h_pre);
            const double y1 = to_centered(h);
            const double p_hi = std::exp(bridge_scale * (psi_b - y0) * (psi_b - y1));
            const double p_lo = std::exp(bridge_scale * (y0 - psi_a) * (y1 - psi_a));
            const double u = side.uniform();
            if (u < p_hi) {
                event = PathEvent::TradeHigh;
            } else if (u < p_hi + p_lo) {
                event = PathEvent::TradeLow;
            }
        }
        if (event != PathEvent::None) {
            const double target = event == PathEvent::TradeLow ? c.alpha : c.beta;
            const double factor = wealth_factor(cp, h, target);
            v *= factor;
            stock = target * v;
            bond = v - stock;
            if constexpr (Record) {
                const double lc = std::log(factor);
                rec.trade_log_sum += lc;
                rec.trades.push_back({static_cast<double>(i) * dt, h, target, factor, lc});
            } else {
                rec.trades.push_back({});
            }
        }
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::NumericalBlowup, "impulse path: wealth left (0, inf)");
        }
        if constexpr (Record) {
            if (keep_sample(cfg, i, event)) {
                rec.samples.push_back({static_cast<double>(i) * dt, stock / v, v, event, h});
            }
        }
    }
    rec.log_wealth_terminal = std::log(bond + stock);
    rec.growth = (rec.log_wealth_terminal - rec.log_v0) / cfg.horizon;
    return rec;
}

template <bool Record>
ReflectedRecord reflected_kernel(const MarketParams& mp, double gamma, double A, double B,
                                 const SimConfig& cfg, std::uint64_t path_index) {
    const double h0 = cfg.h0.value_or(default_h0(mp, A, B));
    if (!(h0 >= A && h0 <= B)) {
        throw invalid_argument("simulate_reflected_path: h0 must lie in [A, B]");
    }
    const std::size_t n = cfg.n_steps();
    const double dt = cfg.dt;
    const double bond_growth = std::exp(mp.r() * dt);
    const double stock_drift = (mp.mu() - 0.5 * mp.sigma_sq()) * dt;
    const double vol = mp.sigma() * std::sqrt(dt);
    StepNoise noise(cfg, path_index);

    ReflectedRecord rec;
    rec.log_v0 = std::log(cfg.v0);
    double bond = cfg.v0 * (1.0 - h0);
    double stock = cfg.v0 * h0;
    if constexpr (Record) {
        rec.samples.push_back({0.0, h0, cfg.v0, PathEvent::None, h0});
    }
    for (std::size_t i = 1; i <= n; ++i) {
        const double h_pre = stock / (bond + stock);
        const double z = noise.next();
        rec.martingale_sum += vol * h_pre * z;
        bond *= bond_growth;
        stock *= std::exp(stock_drift + vol * z);
        const double v = bond + stock;
        const double h = stock / v;
        PathEvent event = PathEvent::None;
        if (h > B) {
            // Selling m leaves stock - m = B (v - gamma m).
            const double m = (stock - B * v) / (1.0 - gamma * B);
            stock -= m;
            bond += (1.0 - gamma) * m;
            rec.sell_volume += m;
            rec.sell_volume_relative += m / v;
            ++rec.upper_projections;
            event = PathEvent::ReflectHigh;
        } else if (h < A) {
            // Buying l leaves stock + l = A (v - gamma l).
            const double l = (A * v - stock) / (1.0 + gamma * A);
            stock += l;
            bond -= (1.0 + gamma) * l;
            rec.buy_volume += l;
            rec.buy_volume_relative += l / v;
            ++rec.lower_projections;
            event = PathEvent::ReflectLow;
        }
        const double v_post = bond + stock;
        if (!(v_post > 0.0) || !std::isfinite(v_post)) {
            throw Error(ErrorCode::NumericalBlowup, "reflected path: wealth left (0, inf)");
        }
        if constexpr (Record) {
            if (keep_sample(cfg, i, event)) {
                rec.samples.push_back({static_cast<double>(i) * dt, stock / v_post, v_post, event, h});
            }
        }
    }
    rec.log_wealth_terminal = std::log(bond + stock);
    rec.growth = (rec.log_wealth_terminal - rec.log_v0) / cfg.horizon;
    return rec;
}

GrowthEstimate summarize(const SimConfig& cfg, const std::vector<double>& growth,
                         const std::vector<double>& compensated) {
    GrowthEstimate est;
    const Stats plain = mean_and_se(growth);
    const Stats comp = mean_and_se(compensated);
    est.mean = plain.mean;
    est.std_error = plain.se;
    est.compensated_mean = comp.mean;
    est.compensated_std_error = comp.se;
    est.n_paths = growth.size();
    est.horizon = cfg.horizon;
    est.dt = cfg.dt;
    return est;
}

}  // namespace

std::size_t SimConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

void SimConfig::validate() const {
    if (!(horizon > 0.0)) throw invalid_argument("SimConfig: horizon T must be > 0");
    if (!(dt > 0.0 && dt <= horizon / 100.0)) throw invalid_argument("SimConfig: 0 < dt <= T/100 required");
    if (!(v0 > 0.0)) throw invalid_argument("SimConfig: v0 must be > 0");
    if (n_paths == 0) throw invalid_argument("SimConfig: n_paths must be >= 1");
    if (substeps == 0) throw invalid_argument("SimConfig: substeps must be >= 1");
}

std::string_view event_name(PathEvent e) {
    switch (e) {
        case PathEvent::TradeLow: return "trade_lo";
        case PathEvent::TradeHigh: return "trade_hi";
        case PathEvent::ReflectLow: return "reflect_lo";
        case PathEvent::ReflectHigh: return "reflect_hi";
        case PathEvent::None: break;
    }
    return "";
}

PathRecord simulate_impulse_path(const MarketParams& mp, const CostParams& cp,
                                 const BoundaryCandidate& cand, const SimConfig& cfg,
                                 std::uint64_t path_index) {
    cfg.validate();
    if (!has_valid_ordering(cand)) {
        throw invalid_argument("simulate_impulse_path: candidate violates 0 < a < alpha <= beta < b < 1");
    }
    return impulse_kernel<true>(mp, cp, cand, cfg, path_index);
}

GrowthEstimate estimate_growth_impulse(const MarketParams& mp, const CostParams& cp,
                                       const BoundaryCandidate& cand, const SimConfig& cfg) {
    cfg.validate();
    if (!has_valid_ordering(cand)) {
        throw invalid_argument("estimate_growth_impulse: candidate violates 0 < a < alpha <= beta < b < 1");
    }
    const std::size_t n = cfg.n_paths;
    std::vector<double> growth(n), comp(n), trades(n);
    parallel_for(n, [&](std::size_t i) {
        const PathRecord rec = impulse_kernel<false>(mp, cp, cand, cfg, i);
        growth[i] = rec.growth;
        comp[i] = rec.growth - rec.martingale_sum / cfg.horizon;
        trades[i] = static_cast<double>(rec.trades.size()) / cfg.horizon;
    });
    GrowthEstimate est = summarize(cfg, growth, comp);
    est.trade_rate = mean_and_se(trades).mean;
    return est;
}

ReflectedRecord simulate_reflected_path(const MarketParams& mp, double gamma, double A, double B,
                                        const SimConfig& cfg, std::uint64_t path_index) {
    cfg.validate();
    if (!(0.0 < A && A < B && B < 1.0)) {
        throw invalid_argument("simulate_reflected_path: requires 0 < A < B < 1");
    }
    return reflected_kernel<true>(mp, gamma, A, B, cfg, path_index);
}

GrowthEstimate estimate_growth_reflected(const MarketParams& mp, double gamma, double A, double B,
                                         const SimConfig& cfg) {
    cfg.validate();
    if (!(0.0 < A && A < B && B < 1.0)) {
        throw invalid_argument("estimate_growth_reflected: requires 0 < A < B < 1");
    }
    const std::size_t n = cfg.n_paths;
    std::vector<double> growth(n), comp(n), buys(n), sells(n);
    parallel_for(n, [&](std::size_t i) {
        const ReflectedRecord rec = reflected_kernel<false>(mp, gamma, A, B, cfg, i);
        growth[i] = rec.growth;
        comp[i] = rec.growth - rec.martingale_sum / cfg.horizon;
        buys[i] = rec.buy_volume_relative / cfg.horizon;
        sells[i] = rec.sell_volume_relative / cfg.horizon;
    });
    GrowthEstimate est = summarize(cfg, growth, comp);
    est.buy_rate = mean_and_se(buys).mean;
    est.sell_rate = mean_and_se(sells).mean;
    return est;
}

CoupledOutcome couple_transformed(const MarketParams& mp, const TransformedLevels& lv,
                                  double reflect_lo, double reflect_hi, double y0,
                                  const SimConfig& cfg, std::uint64_t path_index) {
    cfg.validate();
    if (!(lv.lo_exit <= lv.lo_target && lv.lo_target <= lv.hi_target && lv.hi_target <= lv.hi_exit)) {
        throw invalid_argument("couple_transformed: impulse levels out of order");
    }
    if (!(reflect_lo < reflect_hi)) {
        throw invalid_argument("couple_transformed: reflect_lo < reflect_hi required");
    }
    const std::size_t n = cfg.n_steps();
    const double drift = mp.centered_drift() * cfg.dt;
    const double vol = mp.sigma() * std::sqrt(cfg.dt);
    StepNoise noise(cfg, path_index);

    CoupledOutcome out;
    double yi = y0;
    double yr = std::clamp(y0, reflect_lo, reflect_hi);
    out.sup_distance = std::abs(yi - yr);
    for (std::size_t i = 1; i <= n; ++i) {
        const double inc = drift + vol * noise.next();
        yi += inc;
        if (yi <= lv.lo_exit) {
            yi = lv.lo_target;
            ++out.trades;
        } else if (yi >= lv.hi_exit) {
            yi = lv.hi_target;
            ++out.trades;
        }
        yr = std::clamp(yr + inc, reflect_lo, reflect_hi);
        out.sup_distance = std::max(out.sup_distance, std::abs(yi - yr));
    }
    return out;
}

CouplingTable couple_paths(const MarketParams& mp, double gamma, const std::vector<double>& deltas,
                           const SimConfig& cfg) {
    cfg.validate();
    if (deltas.empty()) {
        throw invalid_argument("couple_paths: deltas must not be empty");
    }
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        if (!(deltas[i] < deltas[i - 1])) {
            throw invalid_argument("couple_paths: deltas must be strictly decreasing");
        }
    }
    const LimitSolution lim = solve_limit(mp, gamma);
    CouplingTable table;
    table.reflect_lo = to_centered(lim.candidate.A);
    table.reflect_hi = to_centered(lim.candidate.B);

    std::vector<BoundarySolution> sols;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (k == 0) {
            sols.push_back(solve_boundaries(mp, CostParams(deltas[0], gamma)));
        } else {
            sols.push_back(continue_boundaries(mp, gamma, deltas[k - 1], sols.back().candidate, deltas[k]));
        }
    }

    double lo = table.reflect_lo;
    double hi = table.reflect_hi;
    for (const auto& s : sols) {
        lo = std::max(lo, to_centered(s.candidate.a));
        hi = std::min(hi, to_centered(s.candidate.b));
    }
    table.y0 = cfg.h0 ? to_centered(*cfg.h0) : to_centered(default_h0(mp, from_centered(lo), from_centered(hi)));
    if (!(table.y0 > lo && table.y0 < hi)) {
        throw invalid_argument("couple_paths: h0 must lie inside every continuation region");
    }

    for (std::size_t k = 0; k < deltas.size(); ++k) {
        const BoundaryCandidate& c = sols[k].candidate;
        CouplingRow row;
        row.delta = deltas[k];
        row.levels = {to_centered(c.a), to_centered(c.alpha), to_centered(c.beta), to_centered(c.b)};
        row.min_jump = std::min(row.levels.lo_target - row.levels.lo_exit,
                                row.levels.hi_exit - row.levels.hi_target);
        row.sup_per_path.resize(cfg.n_paths);
        row.trades_per_path.resize(cfg.n_paths);
        parallel_for(cfg.n_paths, [&](std::size_t i) {
            const CoupledOutcome o = couple_transformed(mp, row.levels, table.reflect_lo,
                                                        table.reflect_hi, table.y0, cfg, i);
            row.sup_per_path[i] = o.sup_distance;
            row.trades_per_path[i] = o.trades;
        });
        const Stats s = mean_and_se(row.sup_per_path);
        row.mean_sup_distance = s.mean;
        row.std_error = s.se;
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace gf
