#include "cli_io.hpp"

#include "growth_frictions/growth_frictions.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace gfcli {

namespace {

namespace fs = std::filesystem;

template <class T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const { Destroy(p); }
};

using Model = std::unique_ptr<gf_model, Deleter<gf_model, gf_model_destroy>>;
using Solution = std::unique_ptr<gf_solution, Deleter<gf_solution, gf_solution_destroy>>;
using Limit = std::unique_ptr<gf_limit, Deleter<gf_limit, gf_limit_destroy>>;
using Sweep = std::unique_ptr<gf_sweep, Deleter<gf_sweep, gf_sweep_destroy>>;
using Grid = std::unique_ptr<gf_grid, Deleter<gf_grid, gf_grid_destroy>>;
using Coupling = std::unique_ptr<gf_coupling, Deleter<gf_coupling, gf_coupling_destroy>>;
using Path = std::unique_ptr<gf_path, Deleter<gf_path, gf_path_destroy>>;

void check(gf_status s) {
    if (s != GF_OK) {
        const std::string reason = s == GF_INVALID_ARGUMENT ? "invalid_config" : gf_status_name(s);
        throw CliError(reason, gf_last_error());
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
        throw CliError("invalid_config", "key '" + key + "': expected a finite number, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
        throw CliError("invalid_config", "key '" + key + "': expected a non-negative integer, got '" + text + "'");
    }
    errno = 0;
    const unsigned long long v = std::strtoull(t.c_str(), nullptr, 10);
    if (errno == ERANGE) {
        throw CliError("invalid_config", "key '" + key + "': integer out of range");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "1" || t == "true" || t == "on" || t == "yes") return true;
    if (t == "0" || t == "false" || t == "off" || t == "no") return false;
    throw CliError("invalid_config", "key '" + key + "': expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) {
        throw CliError("invalid_config", "key '" + key + "': expected a comma-separated list");
    }
    return out;
}

void apply_defaults(RunConfig& cfg) {
    if (cfg.subcommand == "sweep") {
        cfg.deltas = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5, 1e-6};
    } else if (cfg.subcommand == "couple") {
        cfg.deltas = {1e-2, 1e-3, 1e-4};
        cfg.horizon = 10.0;
        cfg.dt = 1e-4;
        cfg.n_paths = 100;
        cfg.record_stride = 1000;
    }
}

void apply_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "r") cfg.r = parse_double(key, value);
    else if (key == "mu") cfg.mu = parse_double(key, value);
    else if (key == "sigma") cfg.sigma = parse_double(key, value);
    else if (key == "delta") cfg.delta = parse_double(key, value);
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "deltas") cfg.deltas = parse_list(key, value);
    else if (key == "grid_n") cfg.grid_n = parse_count(key, value);
    else if (key == "tol") cfg.tol = parse_double(key, value);
    else if (key == "horizon") cfg.horizon = parse_double(key, value);
    else if (key == "dt") cfg.dt = parse_double(key, value);
    else if (key == "v0") cfg.v0 = parse_double(key, value);
    else if (key == "h0") cfg.h0 = parse_double(key, value);
    else if (key == "n_paths") cfg.n_paths = parse_count(key, value);
    else if (key == "seed") cfg.seed = parse_count(key, value);
    else if (key == "bridge_correction") cfg.bridge_correction = parse_bool(key, value);
    else if (key == "substeps") cfg.substeps = static_cast<unsigned>(parse_count(key, value));
    else if (key == "record_stride") cfg.record_stride = parse_count(key, value);
    else if (key == "radius") cfg.radius = parse_double(key, value);
    else if (key == "step") cfg.step = parse_double(key, value);
    else if (key == "solution") cfg.solution = trim(value);
    else if (key == "dump_paths") cfg.dump_paths = parse_count(key, value);
    else if (key == "multi_start") cfg.multi_start = static_cast<int>(parse_count(key, value));
    else throw CliError("unknown_key", "unknown key '" + key + "'");
}

double need(const std::optional<double>& v, const char* key) {
    if (!v) {
        throw CliError("missing_key", std::string("required key '") + key + "' is not set (config file or --" + key + ")");
    }
    return *v;
}

// ---- output helpers ----

class CsvWriter {
public:
    explicit CsvWriter(const fs::path& path) : path_(path), os_(path, std::ios::binary) {
        if (!os_) throw CliError("io", "cannot open '" + path.string() + "' for writing");
    }
    ~CsvWriter() = default;

    CsvWriter& header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
        os_ << "\n";
        return *this;
    }
    CsvWriter& row(const std::vector<std::string>& cells) { return header(cells); }

    void close() {
        os_.flush();
        if (!os_) throw CliError("io", "write failed for '" + path_.string() + "'");
    }

private:
    fs::path path_;
    std::ofstream os_;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) throw CliError("io", "cannot write '" + path.string() + "'");
}

std::string f(double v) { return format_double(v); }
std::string u(std::uint64_t v) { return std::to_string(v); }

fs::path prepare_out(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw CliError("io", "output directory '" + cfg.out_dir + "' is not writable");
    }
    return dir;
}

Model make_model(const RunConfig& cfg, double delta) {
    gf_model* m = nullptr;
    check(gf_model_create(need(cfg.r, "r"), need(cfg.mu, "mu"), need(cfg.sigma, "sigma"), delta,
                          need(cfg.gamma, "gamma"), &m));
    return Model(m);
}

gf_sim_config sim_config(const RunConfig& cfg) {
    gf_sim_config s;
    gf_sim_config_default(&s);
    s.horizon = cfg.horizon;
    s.dt = cfg.dt;
    s.v0 = cfg.v0;
    s.has_h0 = cfg.h0.has_value() ? 1 : 0;
    s.h0 = cfg.h0.value_or(0.0);
    s.n_paths = cfg.n_paths;
    s.base_seed = cfg.seed;
    s.bridge_correction = cfg.bridge_correction ? 1 : 0;
    s.substeps = cfg.substeps;
    s.record_stride = cfg.record_stride;
    return s;
}

void write_verification(const fs::path& path, const gf_verification& v) {
    CsvWriter w(path);
    w.header({"metric", "value"});
    w.row({"grid_n", u(v.grid_n)});
    w.row({"tol", f(v.tol)});
    w.row({"max_interior_residual", f(v.max_interior_residual)});
    w.row({"worst_interior_x", f(v.worst_interior_x)});
    w.row({"max_exterior_excess", f(v.max_exterior_excess)});
    w.row({"worst_exterior_x", f(v.worst_exterior_x)});
    w.row({"max_intervention_excess", f(v.max_intervention_excess)});
    w.row({"worst_intervention_x", f(v.worst_intervention_x)});
    w.row({"boundary_equality_gap", f(v.boundary_equality_gap)});
    w.row({"target_at_lower", f(v.target_at_lower)});
    w.row({"target_at_upper", f(v.target_at_upper)});
    w.row({"pasting_mismatch", f(v.pasting_mismatch)});
    w.row({"strict_margin", f(v.strict_margin)});
    w.row({"passed", v.passed ? "1" : "0"});
    w.close();
}

const std::vector<std::string> kBoundaryHeader = {
    "kind", "r", "mu", "sigma", "delta", "gamma", "l", "x0", "a", "alpha", "beta", "b",
    "rho", "residual_norm", "newton_iters", "original_cost_optimal"};

const std::vector<std::string> kLimitHeader = {"kind", "r", "mu", "sigma", "gamma", "l0", "x0",
                                               "A", "B", "rho0", "residual_norm", "newton_iters"};

void write_boundary_solution(const fs::path& path, const RunConfig& cfg, const gf_solution_info& s) {
    const gf_candidate& c = s.candidate;
    CsvWriter w(path);
    w.header(kBoundaryHeader);
    w.row({"boundary", f(*cfg.r), f(*cfg.mu), f(*cfg.sigma), f(*cfg.delta), f(*cfg.gamma), f(c.l), f(c.x0),
           f(c.a), f(c.alpha), f(c.beta), f(c.b), f(*cfg.r + c.l), f(s.residual_norm),
           std::to_string(s.newton_iters), s.original_cost_optimal ? "1" : "0"});
    w.close();
}

void write_limit_solution(const fs::path& path, const RunConfig& cfg, const gf_limit_info& s) {
    const gf_limit_candidate& c = s.candidate;
    CsvWriter w(path);
    w.header(kLimitHeader);
    w.row({"limit", f(*cfg.r), f(*cfg.mu), f(*cfg.sigma), f(*cfg.gamma), f(c.l0), f(c.x0), f(c.A), f(c.B),
           f(*cfg.r + c.l0), f(s.residual_norm), std::to_string(s.newton_iters)});
    w.close();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::map<std::string, std::string> read_solution_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CliError("io", "cannot open solution file '" + path + "'");
    std::string head, data;
    std::getline(is, head);
    std::getline(is, data);
    const auto h = split_csv_line(trim(head));
    const auto d = split_csv_line(trim(data));
    if (h.empty() || h.size() != d.size()) {
        throw CliError("invalid_config", path + ": expected a header row and one data row of equal width");
    }
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < h.size(); ++i) out[h[i]] = d[i];
    return out;
}

double field(const std::map<std::string, std::string>& m, const std::string& key, const std::string& path) {
    const auto it = m.find(key);
    if (it == m.end()) throw CliError("invalid_config", path + ": missing column '" + key + "'");
    return parse_double(key, it->second);
}

void report_failures(std::ostream& out, const std::vector<std::string>& failures) {
    for (const auto& s : failures) out << "  failure: " << s << "\n";
}

std::vector<std::string> boundary_failures(const gf_solution* sol, const gf_verification& v) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.failure_count; ++i) {
        const char* t = nullptr;
        check(gf_verification_failure(sol, i, &t));
        out.emplace_back(t);
    }
    return out;
}

std::vector<std::string> limit_failures(const gf_limit* lim, const gf_verification& v) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.failure_count; ++i) {
        const char* t = nullptr;
        check(gf_limit_verification_failure(lim, i, &t));
        out.emplace_back(t);
    }
    return out;
}

constexpr double kResidualTol = 1e-10;

void dump_path(const fs::path& path, const gf_path* p) {
    std::size_t n = 0;
    check(gf_path_size(p, &n));
    CsvWriter w(path);
    w.header({"t", "h", "V", "event"});
    for (std::size_t i = 0; i < n; ++i) {
        gf_path_sample s;
        check(gf_path_sample_at(p, i, &s));
        w.row({f(s.t), f(s.h), f(s.wealth), gf_event_name(s.event)});
    }
    w.close();
}

void write_estimate(const fs::path& path, const std::string& kind, const RunConfig& cfg,
                    const gf_growth_estimate& e, double reference) {
    CsvWriter w(path);
    w.header({"kind", "delta", "gamma", "horizon", "dt", "n_paths", "seed", "substeps", "bridge_correction", "mean",
              "std_error", "compensated_mean", "compensated_std_error", "trade_rate", "buy_rate",
              "sell_rate", "reference_rho", "z_score"});
    const double z = e.std_error > 0.0 ? (e.mean - reference) / e.std_error : 0.0;
    w.row({kind, f(cfg.delta.value_or(0.0)), f(*cfg.gamma), f(e.horizon), f(e.dt), u(e.n_paths), u(cfg.seed),
           u(cfg.substeps), cfg.bridge_correction ? "1" : "0", f(e.mean), f(e.std_error),
           f(e.compensated_mean), f(e.compensated_std_error), f(e.trade_rate), f(e.buy_rate),
           f(e.sell_rate), f(reference), f(z)});
    w.close();
}

// ---- subcommands ----

Solution obtain_boundaries(const RunConfig& cfg, const gf_model* model) {
    gf_solution* s = nullptr;
    if (cfg.solution) {
        const auto m = read_solution_file(*cfg.solution);
        gf_candidate c{field(m, "l", *cfg.solution), field(m, "x0", *cfg.solution), field(m, "a", *cfg.solution),
                       field(m, "alpha", *cfg.solution), field(m, "beta", *cfg.solution), field(m, "b", *cfg.solution)};
        check(gf_solution_from_candidate(model, &c, &s));
    } else {
        check(gf_solve_boundaries(model, nullptr, &s));
    }
    return Solution(s);
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = prepare_out(cfg);
    const Model model = make_model(cfg, need(cfg.delta, "delta"));
    gf_solution* raw = nullptr;
    check(gf_solve_boundaries(model.get(), nullptr, &raw));
    const Solution sol(raw);
    gf_solution_info info;
    check(gf_solution_info_get(sol.get(), &info));
    write_boundary_solution(dir / "solution.csv", cfg, info);

    gf_verification v;
    check(gf_verify_qvi(sol.get(), cfg.grid_n, cfg.tol, nullptr, &v));
    write_verification(dir / "verification.csv", v);
    const gf_candidate& c = info.candidate;
    out << "solve: l = " << f(c.l) << ", rho = " << f(*cfg.r + c.l) << "\n"
        << "  a = " << f(c.a) << ", alpha = " << f(c.alpha) << ", x0 = " << f(c.x0) << ", beta = " << f(c.beta)
        << ", b = " << f(c.b) << "\n"
        << "  residual_norm = " << f(info.residual_norm) << ", newton_iters = " << info.newton_iters
        << ", original_cost_optimal = " << info.original_cost_optimal << "\n"
        << "  verification: " << (v.passed ? "passed" : "FAILED") << "\n";
    const auto failures = boundary_failures(sol.get(), v);
    report_failures(out, failures);
    if (info.residual_norm > kResidualTol) {
        throw CliError("residual_violation", "residual max-norm " + f(info.residual_norm) + " exceeds 1e-10");
    }
    if (!v.passed) throw CliError("qvi_violation", failures.empty() ? "verification failed" : failures.front());
    return 0;
}

int cmd_limit(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = prepare_out(cfg);
    const Model model = make_model(cfg, 0.0);
    gf_limit* raw = nullptr;
    check(gf_solve_limit(model.get(), &raw));
    const Limit lim(raw);
    gf_limit_info info;
    check(gf_limit_info_get(lim.get(), &info));
    write_limit_solution(dir / "limit_solution.csv", cfg, info);

    gf_verification v;
    check(gf_verify_hjb_limit(lim.get(), cfg.grid_n, cfg.tol, nullptr, &v));
    write_verification(dir / "hjb_verification.csv", v);

    double spread = 0.0;
    if (cfg.multi_start > 0) {
        std::vector<gf_limit_candidate> starts(static_cast<std::size_t>(cfg.multi_start));
        check(gf_multi_start_limit(model.get(), cfg.multi_start, cfg.seed, starts.data(), &spread));
    }
    const gf_limit_candidate& c = info.candidate;
    out << "limit: l0 = " << f(c.l0) << ", rho0 = " << f(*cfg.r + c.l0) << "\n"
        << "  A = " << f(c.A) << ", x0 = " << f(c.x0) << ", B = " << f(c.B) << "\n"
        << "  residual_norm = " << f(info.residual_norm) << ", c2_mismatch = " << f(info.c2_mismatch) << "\n"
        << "  multi-start spread (" << cfg.multi_start << " starts) = " << f(spread) << "\n"
        << "  verification: " << (v.passed ? "passed" : "FAILED") << "\n";
    const auto failures = limit_failures(lim.get(), v);
    report_failures(out, failures);
    if (info.residual_norm > kResidualTol) {
        throw CliError("residual_violation", "residual max-norm " + f(info.residual_norm) + " exceeds 1e-10");
    }
    if (!v.passed) throw CliError("hjb_violation", failures.empty() ? "verification failed" : failures.front());
    if (spread > 1e-8) throw CliError("multi_start_disagreement", "multi-start spread " + f(spread) + " exceeds 1e-8");
    return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = prepare_out(cfg);
    const Model model = make_model(cfg, 0.0);
    gf_sweep* raw = nullptr;
    check(gf_sweep_delta(model.get(), cfg.deltas.data(), cfg.deltas.size(), &raw));
    const Sweep sweep(raw);
    std::size_t n = 0;
    check(gf_sweep_size(sweep.get(), &n));

    CsvWriter w(dir / "sweep.csv");
    w.header({"delta", "a", "alpha", "beta", "b", "l", "rho", "gap_lo", "gap_hi", "dist_A", "dist_B"});
    for (std::size_t i = 0; i < n; ++i) {
        gf_sweep_row r;
        check(gf_sweep_row_at(sweep.get(), i, &r));
        w.row({f(r.delta), f(r.a), f(r.alpha), f(r.beta), f(r.b), f(r.l), f(r.rho), f(r.gap_lo), f(r.gap_hi),
               f(r.dist_A), f(r.dist_B)});
    }
    gf_sweep_row lr;
    check(gf_sweep_limit_row(sweep.get(), &lr));
    w.row({"0", f(lr.a), "", "", f(lr.b), f(lr.l), f(lr.rho), "0", "0", "0", "0"});
    w.close();
    write_text(dir / "plot_sweep.py", gf_sweep_plot_script("sweep.csv"));

    const char* error = nullptr;
    check(gf_sweep_error(sweep.get(), &error));
    out << "sweep: " << n << " of " << cfg.deltas.size() << " delta rows solved, limit rho0 = " << f(lr.rho) << "\n";
    if (*error) throw CliError("non_convergence", error);
    if (n < 3) {
        out << "  (convergence report needs at least 3 rows)\n";
        return 0;
    }
    gf_report_summary summary;
    const char* text = nullptr;
    const char* csv = nullptr;
    check(gf_convergence_report(sweep.get(), &summary, &text, &csv));
    write_text(dir / "sweep_report.txt", text);
    write_text(dir / "sweep_report.csv", csv);
    out << text;
    if (summary.flag_count > 0) {
        const char* first = nullptr;
        check(gf_report_flag(sweep.get(), 0, &first));
        throw CliError("monotonicity_violation", first);
    }
    return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = prepare_out(cfg);
    const Model model = make_model(cfg, need(cfg.delta, "delta"));
    const Solution sol = obtain_boundaries(cfg, model.get());
    gf_solution_info info;
    check(gf_solution_info_get(sol.get(), &info));
    const gf_sim_config sc = sim_config(cfg);
    gf_growth_estimate e;
    check(gf_estimate_growth_impulse(model.get(), &info.candidate, &sc, &e));
    const double rho = *cfg.r + info.candidate.l;
    write_estimate(dir / "growth_impulse.csv", "impulse", cfg, e, rho);
    for (std::size_t i = 0; i < cfg.dump_paths; ++i) {
        gf_path* raw = nullptr;
        check(gf_simulate_impulse_path(model.get(), &info.candidate, &sc, i, &raw));
        const Path p(raw);
        dump_path(dir / ("impulse_path_" + std::to_string(i) + ".csv"), p.get());
    }
    out << "simulate: mean growth = " << f(e.mean) << " (SE " << f(e.std_error) << "), r + l = " << f(rho)
        << "\n  compensated mean = " << f(e.compensated_mean) << " (SE " << f(e.compensated_std_error)
        << "), trades per unit time = " << f(e.trade_rate) << "\n";
    return 0;
}

int cmd_reflect(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = prepare_out(cfg);
    const Model model = make_model(cfg, 0.0);
    gf_limit* raw = nullptr;
    check(gf_solve_limit(model.get(), &raw));
    const Limit lim(raw);
    gf_limit_info info;
    check(gf_limit_info_get(lim.get(), &info));
    const gf_sim_config sc = sim_config(cfg);
    gf_growth_estimate e;
    check(gf_estimate_growth_reflected(model.get(), info.candidate.A, info.candidate.B, &sc, &e));
    const double rho0 = *cfg.r + info.candidate.l0;
    write_estimate(dir / "growth_reflected.csv", "reflected", cfg, e, rho0);
    for (std::size_t i = 0; i < cfg.dump_paths; ++i) {
        gf_path* praw = nullptr;
        check(gf_simulate_reflected_path(model.get(), info.candidate.A, info.candidate.B, &sc, i, &praw));
        const Path p(praw);
        dump_path(dir / ("reflected_path_" + std::to_string(i) + ".csv"), p.get());
    }
    out << "reflect: mean growth = " << f(e.mean) << " (SE " << f(e.std_error) << "), r + l0 = " << f(rho0)
        << "\n  compensated mean = " << f(e.compensated_mean) << " (SE " << f(e.compensated_std_error)
        << "), buy rate = " << f(e.buy_rate) << ", sell rate = " << f(e.sell_rate) << "\n";
    return 0;
}

std::string coupling_plot_script(const std::string& csv) {
    return "import csv\n"
           "import matplotlib.pyplot as plt\n\n"
           "rows = list(csv.DictReader(open(\"" + csv + "\")))\n"
           "d = [float(r[\"delta\"]) for r in rows]\n"
           "m = [float(r[\"mean_sup_distance\"]) for r in rows]\n"
           "e = [float(r[\"std_error\"]) for r in rows]\n\n"
           "fig, ax = plt.subplots(figsize=(6, 4))\n"
           "ax.errorbar(d, m, yerr=[3 * x for x in e], marker=\"o\", capsize=3)\n"
           "ax.set_xscale(\"log\")\n"
           "ax.set_yscale(\"log\")\n"
           "ax.set_xlabel(\"delta\")\n"
           "ax.set_ylabel(\"mean sup |Y_delta - Y|\")\n"
           "fig.tight_layout()\n"
           "fig.savefig(\"coupling.png\", dpi=150)\n";
}

int cmd_couple(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = prepare_out(cfg);
    const Model model = make_model(cfg, 0.0);
    const gf_sim_config sc = sim_config(cfg);
    gf_coupling* raw = nullptr;
    check(gf_couple_paths(model.get(), cfg.deltas.data(), cfg.deltas.size(), &sc, &raw));
    const Coupling cp(raw);
    std::size_t n = 0;
    check(gf_coupling_size(cp.get(), &n));
    double lo = 0.0, hi = 0.0, y0 = 0.0;
    check(gf_coupling_limits(cp.get(), &lo, &hi, &y0));

    CsvWriter w(dir / "coupling.csv");
    w.header({"delta", "lo_exit", "lo_target", "hi_target", "hi_exit", "reflect_lo", "reflect_hi", "y0",
              "mean_sup_distance", "std_error", "min_jump", "mean_trades"});
    out << "couple: reflected limits [" << f(lo) << ", " << f(hi) << "], y0 = " << f(y0) << "\n";
    std::vector<gf_coupling_row> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        gf_coupling_row& r = rows[i];
        check(gf_coupling_row_at(cp.get(), i, &r));
        w.row({f(r.delta), f(r.lo_exit), f(r.lo_target), f(r.hi_target), f(r.hi_exit), f(lo), f(hi), f(y0),
               f(r.mean_sup_distance), f(r.std_error), f(r.min_jump), f(r.mean_trades)});
        out << "  delta = " << f(r.delta) << ": mean sup distance = " << f(r.mean_sup_distance) << " (SE "
            << f(r.std_error) << ")\n";
    }
    w.close();
    write_text(dir / "plot_coupling.py", coupling_plot_script("coupling.csv"));
    for (std::size_t i = 1; i < n; ++i) {
        if (!(rows[i].mean_sup_distance < rows[i - 1].mean_sup_distance)) {
            throw CliError("monotonicity_violation",
                           "mean sup distance does not decrease from delta " + f(rows[i - 1].delta) + " to " +
                               f(rows[i].delta));
        }
    }
    return 0;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = prepare_out(cfg);
    const Model model = make_model(cfg, need(cfg.delta, "delta"));
    const Solution sol = obtain_boundaries(cfg, model.get());
    gf_solution_info info;
    check(gf_solution_info_get(sol.get(), &info));
    double renewal = 0.0;
    check(gf_evaluate_policy_renewal(model.get(), &info.candidate, &renewal));
    gf_grid* raw = nullptr;
    check(gf_brute_force_boundaries(model.get(), &info.candidate, cfg.radius, cfg.step, &raw));
    const Grid grid(raw);
    std::size_t n = 0;
    check(gf_grid_size(grid.get(), &n));
    CsvWriter w(dir / "oracle_grid.csv");
    w.header({"a", "alpha", "beta", "b", "growth"});
    for (std::size_t i = 0; i < n; ++i) {
        gf_grid_point p;
        check(gf_grid_point_at(grid.get(), i, &p));
        w.row({f(p.a), f(p.alpha), f(p.beta), f(p.b), f(p.growth)});
    }
    w.close();

    gf_candidate best;
    double best_growth = 0.0;
    check(gf_grid_best(grid.get(), &best, &best_growth));
    const gf_candidate& c = info.candidate;
    const double offset = std::max({std::abs(best.a - c.a), std::abs(best.alpha - c.alpha),
                                    std::abs(best.beta - c.beta), std::abs(best.b - c.b)});
    const double rho = *cfg.r + c.l;
    CsvWriter s(dir / "oracle_summary.csv");
    s.header({"rho_solver", "rho_renewal", "renewal_gap", "best_a", "best_alpha", "best_beta", "best_b",
              "best_growth", "argmax_offset", "step", "grid_points"});
    s.row({f(rho), f(renewal), f(renewal - rho), f(best.a), f(best.alpha), f(best.beta), f(best.b), f(best_growth),
           f(offset), f(cfg.step), u(n)});
    s.close();
    out << "oracle: r + l = " << f(rho) << ", renewal = " << f(renewal) << " (gap " << f(renewal - rho) << ")\n"
        << "  brute-force argmax offset = " << f(offset) << " over " << n << " grid points (step " << f(cfg.step)
        << ")\n";
    if (std::abs(renewal - rho) > 1e-8) {
        throw CliError("oracle_mismatch", "renewal value differs from r + l by " + f(renewal - rho));
    }
    if (offset > cfg.step * (1.0 + 1e-9)) {
        throw CliError("oracle_mismatch", "brute-force argmax is " + f(offset) + " from the solver candidate");
    }
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.solution) {
        throw CliError("missing_key", "required key 'solution' is not set (config file or --solution)");
    }
    const fs::path dir = prepare_out(cfg);
    const std::string& path = *cfg.solution;
    const auto m = read_solution_file(path);
    const auto kind = m.find("kind");
    if (kind == m.end()) throw CliError("invalid_config", path + ": missing column 'kind'");
    const double r = field(m, "r", path);
    const double mu = field(m, "mu", path);
    const double sigma = field(m, "sigma", path);
    const double gamma = field(m, "gamma", path);

    if (kind->second == "boundary") {
        gf_model* mraw = nullptr;
        check(gf_model_create(r, mu, sigma, field(m, "delta", path), gamma, &mraw));
        const Model model(mraw);
        gf_candidate c{field(m, "l", path), field(m, "x0", path), field(m, "a", path),
                       field(m, "alpha", path), field(m, "beta", path), field(m, "b", path)};
        gf_solution* sraw = nullptr;
        check(gf_solution_from_candidate(model.get(), &c, &sraw));
        const Solution sol(sraw);
        gf_solution_info info;
        check(gf_solution_info_get(sol.get(), &info));
        gf_verification v;
        check(gf_verify_qvi(sol.get(), cfg.grid_n, cfg.tol, nullptr, &v));
        write_verification(dir / "verification.csv", v);
        auto failures = boundary_failures(sol.get(), v);
        if (info.residual_norm > kResidualTol) {
            failures.insert(failures.begin(), "residual max-norm " + f(info.residual_norm) + " exceeds 1e-10");
        }
        out << "verify (boundary): residual_norm = " << f(info.residual_norm) << ", "
            << (failures.empty() ? "passed" : "FAILED") << "\n";
        report_failures(out, failures);
        if (!failures.empty()) throw CliError("qvi_violation", failures.front());
        return 0;
    }
    if (kind->second == "limit") {
        gf_model* mraw = nullptr;
        check(gf_model_create(r, mu, sigma, 0.0, gamma, &mraw));
        const Model model(mraw);
        gf_limit_candidate c{field(m, "l0", path), field(m, "x0", path), field(m, "A", path), field(m, "B", path)};
        gf_limit* lraw = nullptr;
        check(gf_limit_from_candidate(model.get(), &c, &lraw));
        const Limit lim(lraw);
        gf_limit_info info;
        check(gf_limit_info_get(lim.get(), &info));
        gf_verification v;
        check(gf_verify_hjb_limit(lim.get(), cfg.grid_n, cfg.tol, nullptr, &v));
        write_verification(dir / "hjb_verification.csv", v);
        auto failures = limit_failures(lim.get(), v);
        if (info.residual_norm > kResidualTol) {
            failures.insert(failures.begin(), "residual max-norm " + f(info.residual_norm) + " exceeds 1e-10");
        }
        out << "verify (limit): residual_norm = " << f(info.residual_norm) << ", "
            << (failures.empty() ? "passed" : "FAILED") << "\n";
        report_failures(out, failures);
        if (!failures.empty()) throw CliError("hjb_violation", failures.front());
        return 0;
    }
    throw CliError("invalid_config", path + ": unknown solution kind '" + kind->second + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& source) {
    std::vector<ConfigEntry> out;
    std::map<std::string, int> seen;
    std::stringstream ss(text);
    std::string line;
    int no = 0;
    while (std::getline(ss, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(no);
        if (eq == std::string::npos) {
            throw CliError("config_parse", where + ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw CliError("config_parse", where + ": expected 'key = value', got '" + line + "'");
        }
        if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
            throw CliError("unknown_key", where + ": unknown key '" + key + "'");
        }
        if (const auto it = seen.find(key); it != seen.end()) {
            throw CliError("config_parse", where + ": duplicate key '" + key + "' (first set on line " +
                                               std::to_string(it->second) + ")");
        }
        seen[key] = no;
        out.push_back({key, value, no});
    }
    return out;
}

RunConfig parse_config(const std::vector<std::string>& args, std::optional<std::string> env_seed) {
    CLI::App app{"Growth-optimal trading boundaries under fixed and proportional costs", "growth-frictions"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::map<std::string, std::string> flags;
    for (const auto& name : kSubcommands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--out", out_dir, "output directory")->required();
        for (const auto& key : kConfigKeys) {
            sub->add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; });
        }
    }
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        throw CliError("usage", app.help());
    } catch (const CLI::ParseError& e) {
        throw CliError("usage", e.what());
    }

    RunConfig cfg;
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.out_dir = out_dir;
    apply_defaults(cfg);
    if (env_seed) {
        cfg.seed = parse_count("GF_SEED", *env_seed);
    }
    std::vector<ConfigEntry> entries;
    if (!config_path.empty()) {
        cfg.config_path = config_path;
        std::ifstream is(config_path, std::ios::binary);
        if (!is) throw CliError("io", "cannot open config file '" + config_path + "'");
        std::stringstream buf;
        buf << is.rdbuf();
        entries = parse_config_text(buf.str(), config_path);
    }
    for (const auto& e : entries) {
        try {
            apply_value(cfg, e.key, e.value);
        } catch (const CliError& err) {
            throw CliError(err.reason(), config_path + ":" + std::to_string(e.line) + ": " + err.what());
        }
        cfg.raw[e.key] = e.value;
    }
    for (const auto& [key, value] : flags) {
        try {
            apply_value(cfg, key, value);
        } catch (const CliError& err) {
            throw CliError(err.reason(), "--" + key + ": " + err.what());
        }
        cfg.raw[key] = value;
    }
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& out) {
    if (cfg.subcommand != "verify") {
        gf_model* m = nullptr;
        check(gf_model_create(need(cfg.r, "r"), need(cfg.mu, "mu"), need(cfg.sigma, "sigma"),
                              cfg.delta.value_or(0.0), need(cfg.gamma, "gamma"), &m));
        gf_model_destroy(m);
    }
    if (cfg.subcommand == "solve") return cmd_solve(cfg, out);
    if (cfg.subcommand == "limit") return cmd_limit(cfg, out);
    if (cfg.subcommand == "sweep") return cmd_sweep(cfg, out);
    if (cfg.subcommand == "simulate") return cmd_simulate(cfg, out);
    if (cfg.subcommand == "reflect") return cmd_reflect(cfg, out);
    if (cfg.subcommand == "couple") return cmd_couple(cfg, out);
    if (cfg.subcommand == "oracle") return cmd_oracle(cfg, out);
    if (cfg.subcommand == "verify") return cmd_verify(cfg, out);
    throw CliError("usage", "unknown subcommand '" + cfg.subcommand + "'");
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const char* env = std::getenv("GF_SEED");
        std::optional<std::string> seed;
        if (env && *env) seed = env;
        return run(parse_config(args, seed), out);
    } catch (const CliError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "ERROR: " << e.reason() << ": " << msg << "\n";
        return e.reason() == "usage" ? 2 : 1;
    }
}

}  // namespace gfcli
