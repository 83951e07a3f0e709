#include "nnosc/cli.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "nnosc/format.hpp"
#include "nnosc/oracle.hpp"
#include "nnosc/trainer.hpp"

namespace nnosc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
}

long long to_integer(const std::string& s) {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
}

int to_int(const std::string& s) {
    const long long v = to_integer(s);
    if (v < INT32_MIN || v > INT32_MAX) throw std::out_of_range(s);
    return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& s) {
    if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument(s);
}

OutputFormat to_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument(s);
}

template <class T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
    if (src) dst = src;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& config_keys() {
    static const std::map<std::string, Setter> keys = {
        {"command",
         [](RunConfig& c, const std::string& v) {
             c.command = command_from_name(v);
             if (!c.command) throw std::invalid_argument(v);
         }},
        {"lambda",
         [](RunConfig& c, const std::string& v) {
             std::vector<double> xs;
             for (const auto& s : split_list(v)) xs.push_back(to_double(s));
             c.lambda_values = xs;
         }},
        {"levels", [](RunConfig& c, const std::string& v) { c.n_levels = to_int(v); }},
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64(v); }},
        {"grid_n", [](RunConfig& c, const std::string& v) { c.grid_n = to_int(v); }},
        {"grid_l", [](RunConfig& c, const std::string& v) { c.grid_l = to_double(v); }},
        {"hidden",
         [](RunConfig& c, const std::string& v) {
             std::vector<std::size_t> hs;
             for (const auto& s : split_list(v)) hs.push_back(static_cast<std::size_t>(to_u64(s)));
             c.hidden_sizes = hs;
         }},
        {"max_iters", [](RunConfig& c, const std::string& v) { c.max_iters = to_int(v); }},
        {"tol", [](RunConfig& c, const std::string& v) { c.tol = to_double(v); }},
        {"learning_rate", [](RunConfig& c, const std::string& v) { c.learning_rate = to_double(v); }},
        {"format", [](RunConfig& c, const std::string& v) { c.output_format = to_format(v); }},
        {"output", [](RunConfig& c, const std::string& v) { c.output_path = v; }},
        {"no_timestamp", [](RunConfig& c, const std::string& v) { c.no_timestamp = to_bool(v); }},
        {"table", [](RunConfig& c, const std::string& v) { c.table = to_int(v); }},
        {"trace_prefix", [](RunConfig& c, const std::string& v) { c.trace_prefix = v; }},
        {"wavefunction_prefix", [](RunConfig& c, const std::string& v) { c.wavefunction_prefix = v; }},
        {"params_prefix", [](RunConfig& c, const std::string& v) { c.params_prefix = v; }},
    };
    return keys;
}

// ---- pipelines ----

struct Job {
    std::vector<SpectrumRow> rows;
    std::vector<std::string> messages;
};

TrainingConfig training_config(const ResolvedConfig& rc, const PotentialSpec& spec) {
    TrainingConfig cfg = default_training_config(spec);
    cfg.seed = rc.seed;
    cfg.hidden_sizes = rc.hidden_sizes;
    cfg.max_iters = rc.max_iters;
    cfg.tol = rc.tol;
    cfg.learning_rate = rc.learning_rate;
    if (rc.grid_n || rc.grid_l) {
        cfg.grid = CollocationGrid(rc.grid_l.value_or(cfg.grid.half_width()), rc.grid_n.value_or(cfg.grid.n_points()));
    }
    return cfg;
}

std::string dump_name(const std::string& prefix, double lambda, int level, const char* ext) {
    return prefix + "_lambda" + format_real(lambda) + "_n" + std::to_string(level) + ext;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

void dump_level(const ResolvedConfig& rc, double lambda, int level, const TrialWavefunction& trial,
                const TrainingReport& report, const CollocationGrid& report_grid) {
    if (!rc.trace_prefix.empty()) write_file(dump_name(rc.trace_prefix, lambda, level, ".csv"), trace_csv(report));
    if (!rc.wavefunction_prefix.empty()) {
        write_file(dump_name(rc.wavefunction_prefix, lambda, level, ".csv"), wavefunction_csv(trial, report_grid));
    }
    if (!rc.params_prefix.empty()) {
        write_file(dump_name(rc.params_prefix, lambda, level, ".json"), params_to_json(trial.net()) + "\n");
    }
}

std::string unconverged_note(const TrainingReport& report, double tol) {
    if (report.fault) return *report.fault;
    if (report.converged) return {};
    return "scaled loss " + format_real(report.final_scaled_loss) + " above tol " + format_real(tol);
}

std::vector<double> oracle_levels(const PotentialSpec& spec, int n_levels, bool harmonic) {
    std::vector<double> out;
    if (harmonic) {
        for (int n = 0; n < n_levels; ++n) out.push_back(harmonic_exact_level(n));
        return out;
    }
    return richardson_refine(spec, oracle_default_grid(spec), n_levels).best();
}

/// Trains n_levels levels of spec and compares them with the oracle.
Job train_potential(const ResolvedConfig& rc, const PotentialSpec& spec, double lambda, int n_levels, bool harmonic) {
    Job job;
    const TrainingConfig cfg = training_config(rc, spec);
    const std::vector<double> oracle = oracle_levels(spec, n_levels, harmonic);
    if (n_levels == 1) {
        const TrainedLevel t = train_level(cfg, init_params(cfg.hidden_sizes, cfg.seed));
        dump_level(rc, lambda, 0, t.trial, t.report, cfg.effective_report_grid());
        job.rows.push_back(make_row(lambda, 0, t.report.final_energy, oracle[0], t.report.converged,
                                    unconverged_note(t.report, cfg.tol)));
        return job;
    }
    const auto levels = solve_spectrum(spec, n_levels, cfg);
    for (const auto& l : levels) {
        dump_level(rc, lambda, l.level, l.trial, l.report, cfg.effective_report_grid());
        std::string note = l.note;
        if (note.empty()) note = unconverged_note(l.report, cfg.tol);
        job.rows.push_back(make_row(lambda, l.level, l.energy, oracle[l.level], l.converged, note));
    }
    return job;
}

template <class F>
std::vector<Job> parallel_map(const std::vector<double>& lambdas, F f) {
    std::vector<std::future<Job>> futures;
    for (double lambda : lambdas) futures.push_back(std::async(std::launch::async, f, lambda));
    std::vector<Job> jobs;
    for (auto& fu : futures) jobs.push_back(fu.get());
    return jobs;
}

const char* paint(bool color, bool ok) {
    if (!color) return "";
    return ok ? "\033[32m" : "\033[31m";
}

void summarize(const SpectrumResult& result, std::ostream& err, bool color) {
    for (const auto& r : result.rows) {
        err << "lambda=" << format_real(r.lambda) << " n=" << r.level << " E_nn=" << format_real(r.e_nn)
            << " E_oracle=" << format_real(r.e_oracle) << " rel_diff=" << format_real(r.rel_diff) << ' '
            << paint(color, r.converged) << (r.converged ? "converged" : "UNCONVERGED") << (color ? "\033[0m" : "");
        if (!r.note.empty()) err << " (" << r.note << ')';
        err << '\n';
    }
    const auto bad = result.unconverged();
    if (!bad.empty()) {
        err << "unconverged (lambda, n):";
        for (const auto& [lambda, n] : bad) err << " (" << format_real(lambda) << ", " << n << ')';
        err << '\n';
    }
}

nlohmann::ordered_json rows_json(const std::vector<SpectrumRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back(row_json(r));
    return arr;
}

std::string document_text(const ResolvedConfig& rc, nlohmann::ordered_json results) {
    std::optional<std::string> ts;
    if (!rc.no_timestamp) ts = utc_timestamp();
    return results_document(config_json(rc), std::move(results), rc.seed, ts).dump(2) + "\n";
}

// ---- reproduce-tables ----

struct TableOutput {
    std::string csv;
    nlohmann::ordered_json json;
    std::vector<SpectrumRow> rows;
};

TableOutput table1(const ResolvedConfig& rc) {
    const Job job = train_potential(rc, PotentialSpec::harmonic_half(), 0.0, 1, true);
    const SpectrumRow& r = job.rows[0];
    TableOutput t;
    t.rows = job.rows;
    t.csv = "eigenvalue,E_nn,published_nn,exact,rel_diff,converged\nE," + format_real(r.e_nn) + ',' +
            format_real(kHarmonicReference.published_nn) + ',' + format_real(kHarmonicReference.exact) + ',' +
            format_real(r.rel_diff) + ',' + (r.converged ? "true" : "false") + '\n';
    nlohmann::ordered_json j = row_json(r);
    j["published_nn"] = kHarmonicReference.published_nn;
    j["exact"] = kHarmonicReference.exact;
    t.json = nlohmann::ordered_json::array({j});
    return t;
}

TableOutput table2(const ResolvedConfig& rc) {
    std::vector<double> lambdas;
    for (const auto& ref : kGroundStateReference) lambdas.push_back(ref.lambda);
    const auto jobs = parallel_map(lambdas, [&rc](double lambda) {
        return train_potential(rc, PotentialSpec::anharmonic_table(lambda), lambda, 1, false);
    });
    TableOutput t;
    t.csv = "lambda,E_nn,E_oracle,published_nn,ref23,ref28,ref30,rel_diff,converged\n";
    t.json = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const SpectrumRow& r = jobs[i].rows[0];
        const auto& ref = kGroundStateReference[i];
        t.rows.push_back(r);
        t.csv += format_real(r.lambda) + ',' + format_real(r.e_nn) + ',' + format_real(r.e_oracle) + ',' +
                 format_real(ref.published_nn) + ',' + format_real(ref.ref23) + ',' + format_real(ref.ref28) + ',' +
                 format_real(ref.ref30) + ',' + format_real(r.rel_diff) + ',' + (r.converged ? "true" : "false") + '\n';
        nlohmann::ordered_json j = row_json(r);
        j["published_nn"] = ref.published_nn;
        j["ref23"] = ref.ref23;
        j["ref28"] = ref.ref28;
        j["ref30"] = ref.ref30;
        t.json.push_back(j);
    }
    return t;
}

TableOutput table3(const ResolvedConfig& rc) {
    constexpr int kLevels = static_cast<int>(std::size(kExcitedReference));
    const Job job = train_potential(rc, PotentialSpec::anharmonic_table(kExcitedReferenceLambda),
                                    kExcitedReferenceLambda, kLevels, false);
    TableOutput t;
    t.csv = "n,E_nn,E_oracle,published_nn,ref23,ref31,rel_diff,converged,note\n";
    t.json = nlohmann::ordered_json::array();
    for (int n = 0; n < kLevels; ++n) {
        SpectrumRow r = job.rows[n];
        const auto& ref = kExcitedReference[n];
        if (references_disagree(ref)) {
            const std::string flag = "reference columns disagree beyond " + format_real(kReferenceDisagreement);
            r.note = r.note.empty() ? flag : flag + "; " + r.note;
        }
        t.rows.push_back(r);
        std::string note = r.note;
        if (note.find(',') != std::string::npos) note = "\"" + note + "\"";
        t.csv += std::to_string(n) + ',' + format_real(r.e_nn) + ',' + format_real(r.e_oracle) + ',' +
                 format_real(ref.published_nn) + ',' + format_real(ref.ref23) + ',' + format_real(ref.ref31) + ',' +
                 format_real(r.rel_diff) + ',' + (r.converged ? "true" : "false") + ',' + note + '\n';
        nlohmann::ordered_json j = row_json(r);
        j["published_nn"] = ref.published_nn;
        j["ref23"] = ref.ref23;
        j["ref31"] = ref.ref31;
        t.json.push_back(j);
    }
    return t;
}

void emit(const ResolvedConfig& rc, const std::string& text, std::ostream& out) {
    if (rc.output_path.empty() || rc.output_path == "-") {
        out << text;
    } else {
        write_file(rc.output_path, text);
    }
}

}  // namespace

std::string command_name(Command c) {
    switch (c) {
    case Command::harmonic: return "harmonic";
    case Command::anharmonic: return "anharmonic";
    case Command::spectrum: return "spectrum";
    case Command::oracle: return "oracle";
    case Command::reproduce_tables: return "reproduce-tables";
    }
    return "?";
}

std::optional<Command> command_from_name(const std::string& name) {
    for (Command c : {Command::harmonic, Command::anharmonic, Command::spectrum, Command::oracle,
                      Command::reproduce_tables}) {
        if (command_name(c) == name) return c;
    }
    return std::nullopt;
}

void RunConfig::merge(const RunConfig& o) {
    take(command, o.command);
    take(lambda_values, o.lambda_values);
    take(n_levels, o.n_levels);
    take(seed, o.seed);
    take(grid_n, o.grid_n);
    take(grid_l, o.grid_l);
    take(hidden_sizes, o.hidden_sizes);
    take(max_iters, o.max_iters);
    take(tol, o.tol);
    take(learning_rate, o.learning_rate);
    take(output_format, o.output_format);
    take(output_path, o.output_path);
    take(no_timestamp, o.no_timestamp);
    take(table, o.table);
    take(trace_prefix, o.trace_prefix);
    take(wavefunction_prefix, o.wavefunction_prefix);
    take(params_prefix, o.params_prefix);
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = config_keys().find(key);
        if (it == config_keys().end()) throw ConfigError(where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
        try {
            it->second(cfg, value);
        } catch (const std::exception&) {
            throw ConfigError(where + ": invalid value '" + value + "' for key '" + key + "'");
        }
    }
    return cfg;
}

ResolvedConfig resolve(const RunConfig& c) {
    ResolvedConfig r;
    if (c.command) r.command = *c.command;
    if (c.lambda_values) r.lambda_values = *c.lambda_values;
    r.n_levels = c.n_levels.value_or(r.command == Command::spectrum ? 4 : 1);
    if (c.seed) r.seed = *c.seed;
    r.grid_n = c.grid_n;
    r.grid_l = c.grid_l;
    if (c.hidden_sizes) r.hidden_sizes = *c.hidden_sizes;
    if (c.max_iters) r.max_iters = *c.max_iters;
    if (c.tol) r.tol = *c.tol;
    if (c.learning_rate) r.learning_rate = *c.learning_rate;
    if (c.output_format) r.output_format = *c.output_format;
    if (c.output_path) r.output_path = *c.output_path;
    if (c.no_timestamp) r.no_timestamp = *c.no_timestamp;
    r.table = c.table;
    if (c.trace_prefix) r.trace_prefix = *c.trace_prefix;
    if (c.wavefunction_prefix) r.wavefunction_prefix = *c.wavefunction_prefix;
    if (c.params_prefix) r.params_prefix = *c.params_prefix;

    if (r.lambda_values.empty()) throw ConfigError("lambda: at least one value required");
    for (double l : r.lambda_values)
        if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambda: must be finite and >= 0, got " + format_real(l));
    if (r.n_levels < 1) throw ConfigError("levels: must be >= 1");
    if (r.grid_n && *r.grid_n < 3) throw ConfigError("grid_n: must be >= 3");
    if (r.grid_n && r.command == Command::oracle && *r.grid_n < 10 * r.n_levels) {
        throw ConfigError("grid_n: oracle needs at least 10 points per level");
    }
    if (r.grid_l && !(*r.grid_l > 0.0)) throw ConfigError("grid_l: must be > 0");
    if (r.hidden_sizes.empty()) throw ConfigError("hidden: at least one layer required");
    for (auto h : r.hidden_sizes)
        if (h == 0) throw ConfigError("hidden: layer widths must be >= 1");
    if (r.max_iters < 1) throw ConfigError("max_iters: must be >= 1");
    if (!(r.tol > 0.0)) throw ConfigError("tol: must be > 0");
    if (!(r.learning_rate > 0.0)) throw ConfigError("learning_rate: must be > 0");
    if (r.table && (*r.table < 1 || *r.table > 3)) throw ConfigError("table: must be 1, 2 or 3");
    return r;
}

nlohmann::ordered_json config_json(const ResolvedConfig& r) {
    nlohmann::ordered_json j;
    j["command"] = command_name(r.command);
    j["lambda"] = r.lambda_values;
    j["levels"] = r.n_levels;
    j["seed"] = r.seed;
    j["grid_n"] = r.grid_n ? nlohmann::ordered_json(*r.grid_n) : nlohmann::ordered_json(nullptr);
    j["grid_l"] = r.grid_l ? nlohmann::ordered_json(*r.grid_l) : nlohmann::ordered_json(nullptr);
    j["hidden"] = r.hidden_sizes;
    j["max_iters"] = r.max_iters;
    j["tol"] = r.tol;
    j["learning_rate"] = r.learning_rate;
    j["format"] = r.output_format == OutputFormat::csv ? "csv" : "json";
    if (r.table) j["table"] = *r.table;
    return j;
}

RunOutcome run(const ResolvedConfig& rc, std::ostream& out, std::ostream& err, bool color) {
    RunOutcome outcome;
    try {
        if (rc.command == Command::oracle) {
            std::vector<FdSpectrum> spectra;
            for (double lambda : rc.lambda_values) {
                const PotentialSpec spec = PotentialSpec::anharmonic_table(lambda);
                CollocationGrid grid = oracle_default_grid(spec);
                if (rc.grid_n || rc.grid_l) {
                    grid = CollocationGrid(rc.grid_l.value_or(grid.half_width()), rc.grid_n.value_or(grid.n_points()));
                }
                spectra.push_back(richardson_refine(spec, grid, rc.n_levels));
            }
            for (const auto& s : spectra) {
                for (const auto& w : s.warnings) err << "lambda=" << format_real(s.spec.lambda()) << ": " << w << '\n';
                err << "lambda=" << format_real(s.spec.lambda()) << ':';
                for (double e : s.best()) err << ' ' << format_real(e);
                err << '\n';
            }
            if (rc.output_format == OutputFormat::csv) {
                emit(rc, oracle_csv(spectra), out);
            } else {
                nlohmann::ordered_json arr = nlohmann::ordered_json::array();
                for (const auto& s : spectra) {
                    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
                        nlohmann::ordered_json j;
                        j["lambda"] = round_to_output(s.spec.lambda());
                        j["level"] = k;
                        j["eigenvalue_raw"] = round_to_output(s.eigenvalues[k]);
                        j["eigenvalue_refined"] = round_to_output(s.best()[k]);
                        j["grid_n"] = s.grid.n_points();
                        j["L"] = round_to_output(s.grid.half_width());
                        arr.push_back(j);
                    }
                }
                emit(rc, document_text(rc, std::move(arr)), out);
            }
            return outcome;
        }

        if (rc.command == Command::reproduce_tables) {
            std::vector<int> tables = rc.table ? std::vector<int>{*rc.table} : std::vector<int>{1, 2, 3};
            std::vector<std::future<TableOutput>> futures;
            for (int t : tables) {
                futures.push_back(std::async(std::launch::async, [&rc, t] {
                    return t == 1 ? table1(rc) : t == 2 ? table2(rc) : table3(rc);
                }));
            }
            std::string csv;
            nlohmann::ordered_json results;
            for (std::size_t i = 0; i < tables.size(); ++i) {
                TableOutput t = futures[i].get();
                if (tables.size() > 1) csv += (i ? "\n" : "") + std::string("# table ") + std::to_string(tables[i]) + '\n';
                csv += t.csv;
                results["table" + std::to_string(tables[i])] = std::move(t.json);
                outcome.result.rows.insert(outcome.result.rows.end(), t.rows.begin(), t.rows.end());
            }
            emit(rc, rc.output_format == OutputFormat::csv ? csv : document_text(rc, std::move(results)), out);
        } else {
            const bool harmonic = rc.command == Command::harmonic;
            const std::vector<double> lambdas = harmonic ? std::vector<double>{0.0} : rc.lambda_values;
            const auto jobs = parallel_map(lambdas, [&rc, harmonic](double lambda) {
                const PotentialSpec spec =
                    harmonic ? PotentialSpec::harmonic_half() : PotentialSpec::anharmonic_table(lambda);
                return train_potential(rc, spec, lambda, rc.n_levels, harmonic);
            });
            for (const auto& j : jobs) outcome.result.rows.insert(outcome.result.rows.end(), j.rows.begin(), j.rows.end());
            emit(rc,
                 rc.output_format == OutputFormat::csv ? results_csv(outcome.result)
                                                       : document_text(rc, rows_json(outcome.result.rows)),
                 out);
        }
        summarize(outcome.result, err, color);
        outcome.status = outcome.result.all_converged() ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        outcome.status = 2;
    }
    return outcome;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Neural-network eigenvalue solver for the quartic anharmonic oscillator"};
    app.footer(
        "Commands: harmonic, anharmonic, spectrum, oracle, reproduce-tables.\n"
        "Defaults: command anharmonic, lambda 0.1, levels 1 (spectrum: 4), seed 7, hidden 10,\n"
        "max-iters 20000, tol 1e-3, lr 1e-2, format csv, output stdout, timestamp on, all tables.\n"
        "Training grid defaults to 401 points on [-L, L], L = clamp(6 / max(1, lambda^(1/6)), 3, 8);\n"
        "the oracle grid to 4001 points on [-8, 8] (narrower for lambda >= 100).\n"
        "Config file: flat 'key = value' lines with '#' comments; keys are the flag names with\n"
        "'-' replaced by '_' (lr is learning_rate, format, output, no_timestamp = true|false).\n"
        "Flags override config-file values.\n"
        "Exit status: 0 all levels converged, 1 some level unconverged, 2 invalid configuration.");

    RunConfig flags;
    std::string command, format, config_path;
    std::vector<double> lambdas;
    std::vector<std::size_t> hidden;
    int levels = 0, grid_n = 0, max_iters = 0, table = 0;
    std::uint64_t seed = 0;
    double grid_l = 0, tol = 0, lr = 0;
    std::string output, trace, wave, params;
    bool no_timestamp = false;

    app.add_option("command", command, "harmonic | anharmonic | spectrum | oracle | reproduce-tables");
    auto* o_lambda = app.add_option("--lambda", lambdas, "Quartic coupling(s), comma separated")->delimiter(',');
    auto* o_levels = app.add_option("--levels", levels, "Number of levels");
    auto* o_seed = app.add_option("--seed", seed, "Initialization seed");
    auto* o_grid_n = app.add_option("--grid-n", grid_n, "Grid points");
    auto* o_grid_l = app.add_option("--grid-l", grid_l, "Grid half-width L");
    auto* o_hidden = app.add_option("--hidden", hidden, "Hidden layer widths, comma separated")->delimiter(',');
    auto* o_iters = app.add_option("--max-iters", max_iters, "Iteration cap per level");
    auto* o_tol = app.add_option("--tol", tol, "Convergence tolerance on loss / max(1, E^2)");
    auto* o_lr = app.add_option("--lr", lr, "Adam learning rate");
    auto* o_format = app.add_option("--format", format, "csv | json");
    auto* o_output = app.add_option("--output", output, "Result file (default stdout)");
    app.add_option("--config", config_path, "Config file");
    auto* o_nots = app.add_flag("--no-timestamp", no_timestamp, "Omit the provenance timestamp");
    auto* o_table = app.add_option("--table", table, "Table to reproduce (1, 2 or 3)");
    auto* o_trace = app.add_option("--trace-prefix", trace, "Write per-level loss traces");
    auto* o_wave = app.add_option("--wavefunction-prefix", wave, "Write per-level wavefunctions");
    auto* o_params = app.add_option("--params-prefix", params, "Write per-level network parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("config: cannot read " + config_path);
            std::stringstream ss;
            ss << f.rdbuf();
            cfg = parse_config(ss.str());
        }
        if (!command.empty()) {
            flags.command = command_from_name(command);
            if (!flags.command) throw ConfigError("command: unknown '" + command + "'");
        }
        if (o_lambda->count()) flags.lambda_values = lambdas;
        if (o_levels->count()) flags.n_levels = levels;
        if (o_seed->count()) flags.seed = seed;
        if (o_grid_n->count()) flags.grid_n = grid_n;
        if (o_grid_l->count()) flags.grid_l = grid_l;
        if (o_hidden->count()) flags.hidden_sizes = hidden;
        if (o_iters->count()) flags.max_iters = max_iters;
        if (o_tol->count()) flags.tol = tol;
        if (o_lr->count()) flags.learning_rate = lr;
        if (o_format->count()) {
            if (format != "csv" && format != "json") throw ConfigError("format: must be csv or json");
            flags.output_format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
        }
        if (o_output->count()) flags.output_path = output;
        if (o_nots->count()) flags.no_timestamp = no_timestamp;
        if (o_table->count()) flags.table = table;
        if (o_trace->count()) flags.trace_prefix = trace;
        if (o_wave->count()) flags.wavefunction_prefix = wave;
        if (o_params->count()) flags.params_prefix = params;
        cfg.merge(flags);
        const ResolvedConfig rc = resolve(cfg);
        const char* no_color = std::getenv("NO_COLOR");
        const bool color = (no_color == nullptr || *no_color == '\0') && isatty(fileno(stderr));
        return run(rc, std::cout, std::cerr, color).status;
    } catch (const ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace nnosc
