#ifndef NNOSC_RESULTS_HPP
#define NNOSC_RESULTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace nnosc {

/// One (lambda, level) comparison. All reals are held at output precision so that a
/// CSV round trip reproduces the row exactly.
struct SpectrumRow {
    double lambda = 0.0;
    int level = 0;
    double e_nn = 0.0;
    double e_oracle = 0.0;
    double abs_diff = 0.0;
    double rel_diff = 0.0;
    bool converged = false;
    std::string note;

    bool operator==(const SpectrumRow&) const = default;
};

/// Builds a row, rounding inputs to output precision and deriving abs_diff / rel_diff from
/// the rounded energies.
SpectrumRow make_row(double lambda, int level, double e_nn, double e_oracle, bool converged, std::string note = {});

struct SpectrumResult {
    std::vector<SpectrumRow> rows;

    bool all_converged() const;
    std::vector<std::pair<double, int>> unconverged() const;
    bool operator==(const SpectrumResult&) const = default;
};

/// Header: lambda,n,E_nn,E_oracle,abs_diff,rel_diff,converged,note
std::string results_csv(const SpectrumResult& result);

/// Inverse of results_csv. Throws std::invalid_argument on malformed input, including
/// rel_diff / abs_diff that disagree with the energies.
SpectrumResult parse_results_csv(const std::string& text);

nlohmann::ordered_json row_json(const SpectrumRow& row);

/// {"config": ..., "results": [...], "provenance": {"version", "seed", "timestamp"?}}
nlohmann::ordered_json results_document(const nlohmann::ordered_json& config, nlohmann::ordered_json results,
                                        std::uint64_t seed, const std::optional<std::string>& timestamp);

inline constexpr const char* kVersion = "1.0.0";

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

// Published reference values, transcribed verbatim.

struct HarmonicReference {
    double published_nn;
    double exact;
};
inline constexpr HarmonicReference kHarmonicReference{0.502739612, 0.5};

struct GroundStateReference {
    double lambda;
    double published_nn;
    double ref23;
    double ref28;
    double ref30;
};
inline constexpr GroundStateReference kGroundStateReference[] = {
    {0.025, 1.0180097924545166, 1.0180010006248, 1.0180010006142, 1.0180010006142},
    {0.05, 1.034240512816455, 1.0347296978234, 1.0347296972554, 1.0347296972530},
    {0.1, 1.0654383929670153, 1.0652855199, 1.0652855096, 1.0652854984},
    {0.2, 1.1131419947840997, 1.1182927141, 1.1182926544, 1.1182887632},
    {0.5, 1.2430124818673798, 1.2418546983, 1.2418540597, 1.2412579542},
    {1.0, 1.3929635377412355, 1.3923519526, 1.3923516416, 1.3853951994},
    {4.0, 1.9029500973873372, 1.9031372697, 1.9031369454, 1.769229616},
    {100.0, 4.9974247519017035, 4.9991429, 4.9994175452, 4.9580018282},
    {400.0, 7.862963023360612, 7.8620150257, 7.8618626782, 7.670735377},
    {2000.0, 13.382962917034375, 13.388719667, 13.388441701, 12.7473822552},
    {40000.0, 36.2329683376409, 36.275234713, 36.274458146, 33.30734404},
    {2e6, 133.6329668678526, 133.6029981, 133.6001252, 120.199459212},
};

struct ExcitedReference {
    int level;
    double published_nn;
    double ref23;
    double ref31;
};
inline constexpr double kExcitedReferenceLambda = 0.1;
inline constexpr ExcitedReference kExcitedReference[] = {
    {0, 1.0654383929670153, 1.065286, 1.065286},  {1, 3.3019057811028074, 3.306872, 3.306872},
    {2, 5.749852350602235, 5.747959, 5.747959},   {3, 8.358116291676646, 8.352686, 8.352678},
    {4, 11.09861795976142, 11.09837, 11.09860},   {5, 13.968331266291228, 13.96890, 13.96993},
    {6, 16.95956005318641, 16.95307, 16.95479},   {7, 20.000623087595994, 20.00854, 20.04386},
};

/// Relative gap between the two literature columns above which a level is flagged.
inline constexpr double kReferenceDisagreement = 1e-4;

/// True when ref23 and ref31 differ by more than kReferenceDisagreement relative.
bool references_disagree(const ExcitedReference& r);

}  // namespace nnosc

#endif  // NNOSC_RESULTS_HPP
