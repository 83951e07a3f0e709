#ifndef NNOSC_CLI_HPP
#define NNOSC_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnosc/results.hpp"

namespace nnosc {

/// Invalid configuration; the message names the field (and line, for config files).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

enum class Command { harmonic, anharmonic, spectrum, oracle, reproduce_tables };
enum class OutputFormat { csv, json };

std::string command_name(Command c);
std::optional<Command> command_from_name(const std::string& name);

/// Every field is optional so that config-file values and command-line flags can be layered;
/// unset fields fall back to the defaults documented in --help.
struct RunConfig {
    std::optional<Command> command;
    std::optional<std::vector<double>> lambda_values;
    std::optional<int> n_levels;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid_n;
    std::optional<double> grid_l;
    std::optional<std::vector<std::size_t>> hidden_sizes;
    std::optional<int> max_iters;
    std::optional<double> tol;
    std::optional<double> learning_rate;
    std::optional<OutputFormat> output_format;
    /// Empty or "-" is standard output.
    std::optional<std::string> output_path;
    std::optional<bool> no_timestamp;
    std::optional<int> table;
    /// Per-level dump files <prefix>_lambda<L>_n<n>.csv / .json.
    std::optional<std::string> trace_prefix;
    std::optional<std::string> wavefunction_prefix;
    std::optional<std::string> params_prefix;

    /// Fields set in over replace those here.
    void merge(const RunConfig& over);
};

/// Flat "key = value" lines; '#' starts a comment. Lists are comma separated.
/// Keys: command, lambda, levels, seed, grid_n, grid_l, hidden, max_iters, tol,
/// learning_rate, format, output, no_timestamp, table, trace_prefix,
/// wavefunction_prefix, params_prefix.
/// Throws ConfigError with the line number on duplicate, unknown or ill-typed keys.
RunConfig parse_config(const std::string& text);

/// Fully resolved settings.
struct ResolvedConfig {
    Command command = Command::anharmonic;
    std::vector<double> lambda_values{0.1};
    int n_levels = 1;
    std::uint64_t seed = 7;
    std::optional<int> grid_n;
    std::optional<double> grid_l;
    std::vector<std::size_t> hidden_sizes{10};
    int max_iters = 20000;
    double tol = 1e-3;
    double learning_rate = 1e-2;
    OutputFormat output_format = OutputFormat::csv;
    std::string output_path;
    bool no_timestamp = false;
    std::optional<int> table;
    std::string trace_prefix;
    std::string wavefunction_prefix;
    std::string params_prefix;
};

/// Applies defaults and validates ranges. Throws ConfigError naming the field.
ResolvedConfig resolve(const RunConfig& cfg);

nlohmann::ordered_json config_json(const ResolvedConfig& cfg);

struct RunOutcome {
    int status = 0;
    SpectrumResult result;
};

/// Executes the pipeline, writes the artifact to cfg.output_path (or out) and a summary to err.
/// status: 0 all converged, 1 some level unconverged, 2 invalid configuration.
RunOutcome run(const ResolvedConfig& cfg, std::ostream& out, std::ostream& err, bool color = false);

/// Full command-line entry point (flags, --config, exit status).
int cli_main(int argc, char** argv);

}  // namespace nnosc

#endif  // NNOSC_CLI_HPP
