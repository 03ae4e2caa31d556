#pragma once

#include "market_model.hpp"
#include "qvi_boundary_solver.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gf {

struct SimConfig {
    double horizon = 200.0;
    double dt = 1e-3;
    double v0 = 1.0;
    /// Initial risky fraction; defaults to the Merton fraction clipped into the region.
    std::optional<double> h0;
    std::uint64_t n_paths = 1000;
    std::uint64_t base_seed = 0;
    /// Brownian-bridge crossing detection within a step (impulse simulator only).
    bool bridge_correction = false;
    /// Each step's normal is the normalized sum of this many stream normals, so
    /// a run at k*dt with substeps=k shares Brownian increments with a run at dt.
    unsigned substeps = 1;
    /// Keep every n-th step in the sampled path (0: events only).
    std::size_t record_stride = 0;

    std::size_t n_steps() const;
    void validate() const;
};

enum class PathEvent { None, TradeLow, TradeHigh, ReflectLow, ReflectHigh };

std::string_view event_name(PathEvent e);

struct PathSample {
    double t = 0.0;
    double h = 0.0;
    double wealth = 0.0;
    PathEvent event = PathEvent::None;
    /// Fraction before any trade or projection at this time.
    double pre_h = 0.0;
};

struct TradeEvent {
    double time = 0.0;
    double pre_fraction = 0.0;
    double target = 0.0;
    double factor = 1.0;
    double log_cost = 0.0;
};

struct PathRecord {
    std::vector<PathSample> samples;
    std::vector<TradeEvent> trades;
    double log_v0 = 0.0;
    double log_wealth_terminal = 0.0;
    double growth = 0.0;
    /// Sum of per-step portfolio log increments between trades.
    double step_log_sum = 0.0;
    /// Sum of log wealth factors over trades.
    double trade_log_sum = 0.0;
    /// Sum of sigma h_{t_i} sqrt(dt) Z_i; zero-mean by construction.
    double martingale_sum = 0.0;
};

struct ReflectedRecord {
    std::vector<PathSample> samples;
    double log_v0 = 0.0;
    double log_wealth_terminal = 0.0;
    double growth = 0.0;
    double martingale_sum = 0.0;
    /// Cumulative money moved bond -> stock (L) and stock -> bond (M).
    double buy_volume = 0.0;
    double sell_volume = 0.0;
    /// Same increments divided by pre-trade wealth.
    double buy_volume_relative = 0.0;
    double sell_volume_relative = 0.0;
    std::size_t lower_projections = 0;
    std::size_t upper_projections = 0;
};

struct GrowthEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
    double horizon = 0.0;
    double dt = 0.0;
    /// Mean/SE of (log V_T - log v0 - martingale_sum)/T; same expectation as `mean`.
    double compensated_mean = 0.0;
    double compensated_std_error = 0.0;
    /// Time averages per path: trades (impulse) or relative L and M rates (reflected).
    double trade_rate = 0.0;
    double buy_rate = 0.0;
    double sell_rate = 0.0;
};

PathRecord simulate_impulse_path(const MarketParams& mp, const CostParams& cp,
                                 const BoundaryCandidate& cand, const SimConfig& cfg,
                                 std::uint64_t path_index);

GrowthEstimate estimate_growth_impulse(const MarketParams& mp, const CostParams& cp,
                                       const BoundaryCandidate& cand, const SimConfig& cfg);

ReflectedRecord simulate_reflected_path(const MarketParams& mp, double gamma, double A, double B,
                                        const SimConfig& cfg, std::uint64_t path_index);

GrowthEstimate estimate_growth_reflected(const MarketParams& mp, double gamma, double A, double B,
                                         const SimConfig& cfg);

/// Transformed-space levels of an impulse policy: exit below `lo_exit` restarts
/// at `lo_target`, exit above `hi_exit` restarts at `hi_target`.
struct TransformedLevels {
    double lo_exit;
    double lo_target;
    double hi_target;
    double hi_exit;
};

struct CoupledOutcome {
    double sup_distance = 0.0;
    std::size_t trades = 0;
};

/// Impulse-controlled and reflected logit fractions driven by the same normals
/// from (base_seed, path_index); returns sup_t |Y^impulse - Y^reflected|.
CoupledOutcome couple_transformed(const MarketParams& mp, const TransformedLevels& impulse,
                                  double reflect_lo, double reflect_hi, double y0,
                                  const SimConfig& cfg, std::uint64_t path_index);

struct CouplingRow {
    double delta = 0.0;
    TransformedLevels levels{};
    double mean_sup_distance = 0.0;
    double std_error = 0.0;
    /// min(alpha - a, b - beta) in transformed coordinates.
    double min_jump = 0.0;
    std::vector<double> sup_per_path;
    std::vector<std::size_t> trades_per_path;
};

struct CouplingTable {
    double reflect_lo = 0.0;
    double reflect_hi = 0.0;
    double y0 = 0.0;
    std::vector<CouplingRow> rows;
};

CouplingTable couple_paths(const MarketParams& mp, double gamma, const std::vector<double>& deltas,
                           const SimConfig& cfg);

}  // namespace gf
