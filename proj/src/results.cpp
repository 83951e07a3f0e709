#include "nnosc/results.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>
#include <stdexcept>

#include "nnosc/format.hpp"

namespace nnosc {

namespace {

constexpr const char* kHeader = "lambda,n,E_nn,E_oracle,abs_diff,rel_diff,converged,note";

std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_record(const std::string& line, int line_no) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) throw std::invalid_argument("line " + std::to_string(line_no) + ": unterminated quote");
    return fields;
}

double parse_real(const std::string& s, int line_no, const char* field) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad " + field + " '" + s + "'");
    }
    return v;
}

bool same_real(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

SpectrumRow make_row(double lambda, int level, double e_nn, double e_oracle, bool converged, std::string note) {
    SpectrumRow r;
    r.lambda = round_to_output(lambda);
    r.level = level;
    r.e_nn = round_to_output(e_nn);
    r.e_oracle = round_to_output(e_oracle);
    r.abs_diff = round_to_output(std::fabs(r.e_nn - r.e_oracle));
    r.rel_diff = round_to_output(std::fabs(r.e_nn - r.e_oracle) / std::fabs(r.e_oracle));
    r.converged = converged;
    r.note = std::move(note);
    return r;
}

bool SpectrumResult::all_converged() const {
    for (const auto& r : rows)
        if (!r.converged) return false;
    return true;
}

std::vector<std::pair<double, int>> SpectrumResult::unconverged() const {
    std::vector<std::pair<double, int>> out;
    for (const auto& r : rows)
        if (!r.converged) out.emplace_back(r.lambda, r.level);
    return out;
}

std::string results_csv(const SpectrumResult& result) {
    std::ostringstream os;
    os << kHeader << '\n';
    for (const auto& r : result.rows) {
        os << format_real(r.lambda) << ',' << r.level << ',' << format_real(r.e_nn) << ',' << format_real(r.e_oracle)
           << ',' << format_real(r.abs_diff) << ',' << format_real(r.rel_diff) << ',' << (r.converged ? "true" : "false")
           << ',' << quote_field(r.note) << '\n';
    }
    return os.str();
}

SpectrumResult parse_results_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kHeader) {
        throw std::invalid_argument("line 1: expected header '" + std::string(kHeader) + "'");
    }
    SpectrumResult result;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_record(line, line_no);
        if (f.size() != 8) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                                        std::to_string(f.size()));
        }
        SpectrumRow r;
        r.lambda = parse_real(f[0], line_no, "lambda");
        try {
            std::size_t used = 0;
            r.level = std::stoi(f[1], &used);
            if (used != f[1].size()) throw std::invalid_argument(f[1]);
        } catch (const std::exception&) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": bad n '" + f[1] + "'");
        }
        r.e_nn = parse_real(f[2], line_no, "E_nn");
        r.e_oracle = parse_real(f[3], line_no, "E_oracle");
        r.abs_diff = parse_real(f[4], line_no, "abs_diff");
        r.rel_diff = parse_real(f[5], line_no, "rel_diff");
        if (f[6] != "true" && f[6] != "false") {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": bad converged '" + f[6] + "'");
        }
        r.converged = f[6] == "true";
        r.note = f[7];
        const SpectrumRow check = make_row(r.lambda, r.level, r.e_nn, r.e_oracle, r.converged);
        if (!same_real(check.abs_diff, r.abs_diff) || !same_real(check.rel_diff, r.rel_diff)) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": abs_diff/rel_diff inconsistent with energies");
        }
        result.rows.push_back(std::move(r));
    }
    return result;
}

nlohmann::ordered_json row_json(const SpectrumRow& r) {
    auto real = [](double v) -> nlohmann::ordered_json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    nlohmann::ordered_json j;
    j["lambda"] = real(r.lambda);
    j["n"] = r.level;
    j["E_nn"] = real(r.e_nn);
    j["E_oracle"] = real(r.e_oracle);
    j["abs_diff"] = real(r.abs_diff);
    j["rel_diff"] = real(r.rel_diff);
    j["converged"] = r.converged;
    j["note"] = r.note;
    return j;
}

nlohmann::ordered_json results_document(const nlohmann::ordered_json& config, nlohmann::ordered_json results,
                                        std::uint64_t seed, const std::optional<std::string>& timestamp) {
    nlohmann::ordered_json doc;
    doc["config"] = config;
    doc["results"] = std::move(results);
    nlohmann::ordered_json prov;
    prov["version"] = kVersion;
    prov["seed"] = seed;
    if (timestamp) prov["timestamp"] = *timestamp;
    doc["provenance"] = std::move(prov);
    return doc;
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool references_disagree(const ExcitedReference& r) {
    return std::fabs(r.ref23 - r.ref31) / std::fabs(r.ref31) > kReferenceDisagreement;
}

}  // namespace nnosc
