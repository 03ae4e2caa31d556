#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfcli {

/// A failure with a machine-greppable reason token, printed as
/// `ERROR: <reason>: <message>`.
class CliError : public std::runtime_error {
public:
    CliError(std::string reason, const std::string& message)
        : std::runtime_error(message), reason_(std::move(reason)) {}

    const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
};

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Errors name `source:line`.
std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& source);

inline const std::vector<std::string> kSubcommands = {"solve",   "limit",  "sweep",  "simulate",
                                                      "reflect", "couple", "oracle", "verify"};

inline const std::vector<std::string> kConfigKeys = {
    "r",       "mu",       "sigma", "delta",  "gamma",  "deltas",           "grid_n",
    "tol",     "horizon",  "dt",    "v0",     "h0",     "n_paths",          "seed",
    "bridge_correction",   "substeps", "record_stride", "radius", "step",   "solution",
    "dump_paths", "multi_start"};

struct RunConfig {
    std::string subcommand;
    std::string out_dir;
    std::optional<std::string> config_path;

    std::optional<double> r, mu, sigma, delta, gamma;
    std::vector<double> deltas;
    std::size_t grid_n = 2001;
    double tol = 1e-6;

    double horizon = 200.0;
    double dt = 1e-3;
    double v0 = 1.0;
    std::optional<double> h0;
    std::uint64_t n_paths = 1000;
    std::uint64_t seed = 0;
    bool bridge_correction = false;
    unsigned substeps = 1;
    std::size_t record_stride = 1000;

    double radius = 0.02;
    double step = 2e-3;
    std::optional<std::string> solution;
    std::size_t dump_paths = 0;
    int multi_start = 5;

    /// Raw values after merging file and flags, for diagnostics.
    std::map<std::string, std::string> raw;
};

/// argv[0] is the program name. Flags override config-file values; unknown
/// keys in either place are errors. `env_seed` stands in for GF_SEED.
RunConfig parse_config(const std::vector<std::string>& args,
                       std::optional<std::string> env_seed = std::nullopt);

/// Executes the subcommand, writing artifacts under cfg.out_dir and a summary to
/// `out`. Returns 0 iff every invariant check passed; failures throw CliError.
int run(const RunConfig& cfg, std::ostream& out);

/// parse_config + run with error reporting to `err`; the process entry point.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string format_double(double v);

}  // namespace gfcli
