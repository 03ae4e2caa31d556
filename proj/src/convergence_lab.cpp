#include "convergence_lab.hpp"

#include "errors.hpp"
#include "exit_statistics.hpp"
#include "parallel.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gf {

namespace {

/// p within this distance of 0 or 1 leaves one chain state effectively unreachable.
constexpr double kDegenerateExitProbability = 1e-14;

RenewalLeg leg(const MarketParams& mp, const DriftedBrownianExit& exit, double y) {
    RenewalLeg out;
    out.start = y;
    out.upper_exit_probability = exit.upper_exit_probability(y);
    out.expected_time = exit.expected_exit_time(y);
    out.expected_reward = exit.expected_occupation_integral(
        [&](double z) { return growth_integrand_transformed(mp, z); }, y);
    return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) {
        return std::nan("");
    }
    const double dn = static_cast<double>(n);
    const double den = dn * sxx - sx * sx;
    return den == 0.0 ? std::nan("") : (dn * sxy - sx * sy) / den;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SweepRow make_row(const MarketParams& mp, double delta, const BoundaryCandidate& c,
                  const LimitCandidate& lim) {
    SweepRow row;
    row.delta = delta;
    row.a = c.a;
    row.alpha = c.alpha;
    row.beta = c.beta;
    row.b = c.b;
    row.l = c.l;
    row.rho = mp.r() + c.l;
    row.gap_lo = c.alpha - c.a;
    row.gap_hi = c.b - c.beta;
    row.dist_A = std::abs(c.a - lim.A);
    row.dist_B = std::abs(c.b - lim.B);
    return row;
}

}  // namespace

RenewalBreakdown evaluate_policy_renewal_detail(const MarketParams& mp, const CostParams& cp,
                                                const BoundaryCandidate& cand) {
    if (!has_valid_ordering(cand)) {
        throw invalid_argument("evaluate_policy_renewal: candidate violates 0 < a < alpha <= beta < b < 1");
    }
    const DriftedBrownianExit exit(mp.centered_drift(), mp.sigma(), to_centered(cand.a),
                                   to_centered(cand.b));
    RenewalBreakdown out;
    out.from_alpha = leg(mp, exit, to_centered(cand.alpha));
    out.from_beta = leg(mp, exit, to_centered(cand.beta));
    const double pa = out.from_alpha.upper_exit_probability;
    const double pb = out.from_beta.upper_exit_probability;
    for (double p : {pa, pb}) {
        if (p < kDegenerateExitProbability || p > 1.0 - kDegenerateExitProbability) {
            throw Error(ErrorCode::ParameterDegeneracy,
                        "evaluate_policy_renewal: degenerate restart chain, exit probability " +
                            fmt17(p) + " is numerically 0 or 1");
        }
    }
    out.weight_alpha = (1.0 - pb) / (pa + 1.0 - pb);
    out.weight_beta = pa / (pa + 1.0 - pb);
    out.log_factor_lower = std::log(wealth_factor(cp, cand.a, cand.alpha));
    out.log_factor_upper = std::log(wealth_factor(cp, cand.b, cand.beta));

    auto reward = [&](const RenewalLeg& g) {
        const double p = g.upper_exit_probability;
        return g.expected_reward + p * out.log_factor_upper + (1.0 - p) * out.log_factor_lower;
    };
    const double num = out.weight_alpha * reward(out.from_alpha) + out.weight_beta * reward(out.from_beta);
    const double den = out.weight_alpha * out.from_alpha.expected_time +
                       out.weight_beta * out.from_beta.expected_time;
    out.growth = mp.r() + num / den;
    return out;
}

double evaluate_policy_renewal(const MarketParams& mp, const CostParams& cp,
                               const BoundaryCandidate& cand) {
    return evaluate_policy_renewal_detail(mp, cp, cand).growth;
}

BruteForceResult brute_force_boundaries(const MarketParams& mp, const CostParams& cp,
                                        const BoundaryCandidate& center, double radius, double step) {
    if (!(step > 0.0) || !(radius >= 0.0)) {
        throw invalid_argument("brute_force_boundaries: requires step > 0 and radius >= 0");
    }
    const int k = static_cast<int>(std::floor(radius / step + 1e-9));
    const int width = 2 * k + 1;
    std::vector<double> offs(width);
    for (int i = 0; i < width; ++i) offs[i] = (i - k) * step;

    std::vector<GridPoint> pts;
    for (double da : offs)
        for (double dal : offs)
            for (double dbe : offs)
                for (double db : offs) {
                    BoundaryCandidate c = center;
                    c.a += da;
                    c.alpha += dal;
                    c.beta += dbe;
                    c.b += db;
                    if (has_valid_ordering(c)) {
                        pts.push_back({c.a, c.alpha, c.beta, c.b, 0.0});
                    }
                }
    if (pts.empty()) {
        throw invalid_argument("brute_force_boundaries: grid contains no ordered point");
    }
    parallel_for(pts.size(), [&](std::size_t i) {
        GridPoint& p = pts[i];
        BoundaryCandidate c = center;
        c.a = p.a;
        c.alpha = p.alpha;
        c.beta = p.beta;
        c.b = p.b;
        p.growth = evaluate_policy_renewal(mp, cp, c);
    });

    BruteForceResult out;
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].growth > pts[best].growth) best = i;
    }
    out.best = center;
    out.best.a = pts[best].a;
    out.best.alpha = pts[best].alpha;
    out.best.beta = pts[best].beta;
    out.best.b = pts[best].b;
    out.best_growth = pts[best].growth;
    out.grid = std::move(pts);
    return out;
}

SweepRow SweepTable::limit_row() const {
    SweepRow row;
    row.a = limit.candidate.A;
    row.b = limit.candidate.B;
    row.l = limit.candidate.l0;
    row.rho = market.r() + limit.candidate.l0;
    return row;
}

SweepTable sweep_delta(const MarketParams& mp, double gamma, const std::vector<double>& deltas) {
    if (deltas.empty()) {
        throw invalid_argument("sweep_delta: deltas must not be empty");
    }
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) {
            throw invalid_argument("sweep_delta: every delta must be > 0");
        }
        if (i > 0 && !(deltas[i] < deltas[i - 1])) {
            throw invalid_argument("sweep_delta: deltas must be strictly decreasing");
        }
        CostParams(deltas[i], gamma);
    }
    SweepTable table{mp, gamma, {}, solve_limit(mp, gamma), {}};
    std::optional<BoundarySolution> prev;
    for (double d : deltas) {
        try {
            if (!prev) {
                prev = solve_boundaries(mp, CostParams(d, gamma));
            } else {
                prev = continue_boundaries(mp, gamma, table.rows.back().delta, prev->candidate, d);
            }
        } catch (const Error& e) {
            table.error = "delta " + fmt17(d) + ": " + e.what();
            break;
        }
        table.rows.push_back(make_row(mp, d, prev->candidate, table.limit.candidate));
    }
    return table;
}

ConvergenceReport convergence_report(const SweepTable& table) {
    if (table.rows.size() < 3) {
        throw invalid_argument("convergence_report: requires at least 3 sweep rows");
    }
    ConvergenceReport rep;
    const double rho0 = table.limit_row().rho;
    std::vector<double> d, glo, ghi, lgap;
    for (const SweepRow& r : table.rows) {
        d.push_back(r.delta);
        glo.push_back(r.gap_lo);
        ghi.push_back(r.gap_hi);
        lgap.push_back(table.limit.candidate.l0 - r.l);
    }
    rep.slope_gap_lo = fit_loglog_slope(d, glo);
    rep.slope_gap_hi = fit_loglog_slope(d, ghi);
    rep.slope_l_gap = fit_loglog_slope(d, lgap);

    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const SweepRow& p = table.rows[i - 1];
        const SweepRow& q = table.rows[i];
        std::vector<std::string> bad;
        if (!(q.delta < p.delta)) bad.push_back("delta not decreasing");
        if (!(q.gap_lo < p.gap_lo)) bad.push_back("gap_lo not decreasing");
        if (!(q.gap_hi < p.gap_hi)) bad.push_back("gap_hi not decreasing");
        if (!(q.rho > p.rho)) bad.push_back("rho not increasing");
        if (!bad.empty()) {
            std::string msg = "rows " + std::to_string(i - 1) + "-" + std::to_string(i) + ":";
            for (std::size_t j = 0; j < bad.size(); ++j) msg += (j ? ", " : " ") + bad[j];
            rep.flags.push_back(msg);
        }
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (!(table.rows[i].rho < rho0)) {
            rep.flags.push_back("row " + std::to_string(i) + ": rho not below limit rho");
        }
    }

    std::ostringstream text;
    text << "delta sweep: " << table.rows.size() << " rows, gamma = " << fmt17(table.gamma) << "\n"
         << "limit: A = " << fmt17(table.limit.candidate.A) << ", B = " << fmt17(table.limit.candidate.B)
         << ", rho0 = " << fmt17(rho0) << "\n"
         << "log-log slope vs delta: gap_lo " << fmt17(rep.slope_gap_lo) << ", gap_hi "
         << fmt17(rep.slope_gap_hi) << ", l0 - l " << fmt17(rep.slope_l_gap) << "\n"
         << "monotonicity flags: " << rep.flags.size() << "\n";
    for (const auto& f : rep.flags) text << "  " << f << "\n";
    rep.text = text.str();

    std::ostringstream csv;
    csv << "metric,value\n"
        << "slope_gap_lo," << fmt17(rep.slope_gap_lo) << "\n"
        << "slope_gap_hi," << fmt17(rep.slope_gap_hi) << "\n"
        << "slope_l_gap," << fmt17(rep.slope_l_gap) << "\n"
        << "flag_count," << rep.flags.size() << "\n";
    rep.csv = csv.str();
    return rep;
}

std::string sweep_plot_script(const std::string& csv_path) {
    std::ostringstream s;
    s << "import csv\n"
         "import matplotlib.pyplot as plt\n\n"
         "rows = list(csv.DictReader(open(\""
      << csv_path
      << "\")))\n"
         "limit = [r for r in rows if float(r[\"delta\"]) == 0.0][0]\n"
         "rows = [r for r in rows if float(r[\"delta\"]) > 0.0]\n"
         "d = [float(r[\"delta\"]) for r in rows]\n\n"
         "fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))\n"
         "for key in (\"a\", \"alpha\", \"beta\", \"b\"):\n"
         "    ax1.semilogx(d, [float(r[key]) for r in rows], marker=\"o\", label=key)\n"
         "ax1.axhline(float(limit[\"a\"]), color=\"gray\", ls=\"--\", label=\"A\")\n"
         "ax1.axhline(float(limit[\"b\"]), color=\"gray\", ls=\":\", label=\"B\")\n"
         "ax1.set_xlabel(\"delta\")\n"
         "ax1.set_ylabel(\"risky fraction\")\n"
         "ax1.legend()\n"
         "ax2.semilogx(d, [float(r[\"rho\"]) for r in rows], marker=\"o\", label=\"rho\")\n"
         "ax2.axhline(float(limit[\"rho\"]), color=\"gray\", ls=\"--\", label=\"rho0\")\n"
         "ax2.set_xlabel(\"delta\")\n"
         "ax2.set_ylabel(\"growth rate\")\n"
         "ax2.legend()\n"
         "fig.tight_layout()\n"
         "fig.savefig(\"sweep.png\", dpi=150)\n";
    return s.str();
}

}  // namespace gf
