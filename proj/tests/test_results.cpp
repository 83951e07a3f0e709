#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nnosc/results.hpp"

using namespace nnosc;

TEST_CASE("rows derive their differences") {
    const SpectrumRow r = make_row(0.1, 0, 1.0654383929670153, 1.0652855096, true);
    CHECK(r.e_nn == 1.06543839297);
    CHECK(r.e_oracle == 1.0652855096);
    CHECK(r.abs_diff == doctest::Approx(1.5288337e-4).epsilon(1e-6));
    CHECK(r.rel_diff == doctest::Approx(std::fabs(r.e_nn - r.e_oracle) / r.e_oracle).epsilon(1e-11));
}

TEST_CASE("csv round trip") {
    SpectrumResult res;
    res.rows.push_back(make_row(0.025, 0, 1.01811731350001, 1.0180010006142, true));
    res.rows.push_back(make_row(2e6, 0, 133.602902408, 133.6001252, false, "scaled loss 0.01, above \"tol\""));
    res.rows.push_back(make_row(0.1, 3, NAN, 8.352678, false, "collapsed"));
    const SpectrumResult back = parse_results_csv(results_csv(res));
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[0] == res.rows[0]);
    CHECK(back.rows[1] == res.rows[1]);
    CHECK(std::isnan(back.rows[2].e_nn));
    CHECK(back.rows[2].note == "collapsed");
    CHECK(results_csv(back) == results_csv(res));
}

TEST_CASE("csv parse errors") {
    CHECK_THROWS_AS(parse_results_csv("lambda,n\n"), std::invalid_argument);
    const std::string header = "lambda,n,E_nn,E_oracle,abs_diff,rel_diff,converged,note\n";
    CHECK_THROWS_WITH_AS(parse_results_csv(header + "0.1,0,1.1,1.0,0.1,0.5,true,\n"), doctest::Contains("line 2"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_results_csv(header + "0.1,x,1.1,1.0,0.1,0.1,true,\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_results_csv(header + "0.1,0,1.1,1.0,0.1,0.1,maybe,\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_results_csv(header + "0.1,0,1.1\n"), std::invalid_argument);
}

TEST_CASE("convergence bookkeeping") {
    SpectrumResult res;
    res.rows.push_back(make_row(0.1, 0, 1.0, 1.0, true));
    CHECK(res.all_converged());
    res.rows.push_back(make_row(0.1, 5, 14.0, 13.97, false));
    CHECK_FALSE(res.all_converged());
    REQUIRE(res.unconverged().size() == 1);
    CHECK(res.unconverged()[0] == std::pair<double, int>{0.1, 5});
}

TEST_CASE("json document") {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array({row_json(make_row(1.0, 0, 1.3924, 1.39235, true))});
    const auto doc = results_document({{"command", "anharmonic"}}, rows, 7, std::nullopt);
    CHECK(doc["provenance"]["seed"] == 7);
    CHECK(doc["provenance"]["version"] == kVersion);
    CHECK_FALSE(doc["provenance"].contains("timestamp"));
    CHECK(doc["results"][0]["n"] == 0);
    CHECK(doc["results"][0]["converged"] == true);
    const auto stamped = results_document({}, rows, 7, utc_timestamp());
    CHECK(stamped["provenance"]["timestamp"].get<std::string>().size() == 20);
    CHECK(row_json(make_row(0.1, 0, NAN, 1.0, false))["E_nn"].is_null());
}

TEST_CASE("published reference tables") {
    CHECK(std::size(kGroundStateReference) == 12);
    CHECK(kGroundStateReference[0].lambda == 0.025);
    CHECK(kGroundStateReference[11].lambda == 2e6);
    CHECK(std::size(kExcitedReference) == 8);
    for (const auto& r : kExcitedReference) CHECK(references_disagree(r) == (r.level >= 6));
}
