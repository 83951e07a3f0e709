#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nnosc/oracle.hpp"

using namespace nnosc;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("tridiagonal solver on a known matrix") {
    // Discrete Laplacian: eigenvalues 2 - 2 cos(k pi / (n + 1)).
    const int n = 50;
    const SymTridiagonal t(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
    for (int k = 0; k < 5; ++k) {
        CHECK(t.eigenvalue(k) == doctest::Approx(2.0 - 2.0 * std::cos((k + 1) * M_PI / (n + 1))).epsilon(1e-13));
    }
    const auto [lo, hi] = t.gershgorin();
    CHECK(lo <= t.eigenvalue(0));
    CHECK(hi >= t.eigenvalue(n - 1));
    CHECK_THROWS(SymTridiagonal({1.0, 2.0}, {}));
}

TEST_CASE("sturm count agrees with returned eigenvalues") {
    const PotentialSpec spec = PotentialSpec::anharmonic_table(0.1);
    const CollocationGrid g(8.0, 2001);
    const SymTridiagonal t = fd_hamiltonian(spec, g);
    const FdSpectrum s = fd_eigenvalues(spec, g, 6);
    for (double shift : {0.0, 1.0, 2.5, 7.0, 12.0, 16.0}) {
        std::size_t below = 0;
        for (double e : s.eigenvalues) below += e < shift;
        CHECK(t.count_below(shift) == below);
    }
}

TEST_CASE("harmonic spectrum on the default grid") {
    const CollocationGrid g(8.0, 4001);
    const FdSpectrum s = fd_eigenvalues(PotentialSpec::harmonic_half(), g, 3);
    REQUIRE(s.eigenvalues.size() == 3);
    CHECK(std::fabs(s.eigenvalues[0] - 0.5) < 1e-6);
    // Leading error of the three-point stencil: -(h^2/24) <p^4> / m^2 in this convention.
    const double h = g.spacing();
    for (int n = 1; n < 3; ++n) {
        const double predicted = -(h * h / 24.0) * 0.75 * (2.0 * n * n + 2.0 * n + 1.0);
        CHECK(s.eigenvalues[n] - (n + 0.5) == doctest::Approx(predicted).epsilon(1e-3));
    }
    const FdSpectrum r = richardson_refine(PotentialSpec::harmonic_half(), g, 3);
    for (int n = 0; n < 3; ++n) CHECK(std::fabs(r.best()[n] - (n + 0.5)) < 1e-6);
    CHECK(std::fabs(r.best()[0] - 0.5) < std::fabs(r.eigenvalues_fine[0] - 0.5));
    CHECK(s.warnings.empty());
}

TEST_CASE("lambda = 0 spectrum is 2n + 1") {
    const PotentialSpec spec = PotentialSpec::anharmonic_table(0.0);
    const FdSpectrum r = richardson_refine(spec, oracle_default_grid(spec), 6);
    for (int n = 0; n < 6; ++n) CHECK(std::fabs(r.best()[n] - (2 * n + 1)) < 1e-6);
}

TEST_CASE("ground states against published numerical values") {
    const PotentialSpec l01 = PotentialSpec::anharmonic_table(0.1);
    CHECK(rel(richardson_refine(l01, CollocationGrid(8.0, 4001), 1).best()[0], 1.0652855096) < 1e-6);
    const PotentialSpec l100 = PotentialSpec::anharmonic_table(100.0);
    CHECK(rel(fd_eigenvalues(l100, oracle_default_grid(l100), 1).eigenvalues[0], 4.9994175452) < 1e-5);
    const PotentialSpec l2e6 = PotentialSpec::anharmonic_table(2e6);
    CHECK(rel(richardson_refine(l2e6, oracle_default_grid(l2e6), 1).best()[0], 133.6001252) < 1e-5);
    const PotentialSpec l0025 = PotentialSpec::anharmonic_table(0.025);
    CHECK(rel(richardson_refine(l0025, oracle_default_grid(l0025), 1).best()[0], 1.0180010006) < 1e-8);
}

TEST_CASE("second-order convergence") {
    for (double lambda : {0.0, 0.1, 1.0}) {
        const PotentialSpec spec = PotentialSpec::anharmonic_table(lambda);
        const CollocationGrid g(8.0, 1001);
        const FdSpectrum r = richardson_refine(spec, g, 1);
        const double ref = richardson_refine(spec, CollocationGrid(8.0, 8001), 1).best()[0];
        const double factor = (r.eigenvalues[0] - ref) / (r.eigenvalues_fine[0] - ref);
        CHECK(factor >= 3.5);
        CHECK(factor <= 4.5);
    }
}

TEST_CASE("domain independence past the turning point") {
    for (double lambda : {0.0, 0.1, 1.0}) {
        const PotentialSpec spec = PotentialSpec::anharmonic_table(lambda);
        const CollocationGrid a(8.0, 4001), b(9.0, 4501);
        REQUIRE(a.spacing() == doctest::Approx(b.spacing()).epsilon(1e-15));
        const auto ea = fd_eigenvalues(spec, a, 3).eigenvalues, eb = fd_eigenvalues(spec, b, 3).eigenvalues;
        for (int n = 0; n < 3; ++n) CHECK(std::fabs(ea[n] - eb[n]) < 1e-9);
    }
}

TEST_CASE("small domain is flagged") {
    const FdSpectrum s = fd_eigenvalues(PotentialSpec::harmonic_half(), CollocationGrid(2.0, 401), 2);
    CHECK_FALSE(s.warnings.empty());
    CHECK(s.boundary_ratio > kBoundaryWarnRatio);
}

TEST_CASE("eigenvalues strictly increasing") {
    const PotentialSpec spec = PotentialSpec::anharmonic_table(0.1);
    const FdSpectrum s = richardson_refine(spec, oracle_default_grid(spec), 8);
    for (std::size_t k = 1; k < s.eigenvalues.size(); ++k) {
        CHECK(s.eigenvalues[k] > s.eigenvalues[k - 1]);
        CHECK(s.best()[k] > s.best()[k - 1]);
    }
}

TEST_CASE("argument checks") {
    const PotentialSpec spec = PotentialSpec::harmonic_half();
    CHECK_THROWS_AS(fd_eigenvalues(spec, CollocationGrid(8.0, 4001), 0), std::invalid_argument);
    CHECK_THROWS_AS(fd_eigenvalues(spec, CollocationGrid(8.0, 49), 5), std::invalid_argument);
    CHECK_THROWS_AS(asymptotic_check(99.0), std::invalid_argument);
}

TEST_CASE("large-lambda scaling estimate") {
    CHECK(pure_quartic_ground_state() == doctest::Approx(1.06036209042941).epsilon(1e-9));
    CHECK(rel(asymptotic_check(2e6), 133.60) < 1e-3);
    CHECK(rel(asymptotic_check(40000.0), 36.2745) < 5e-3);
    CHECK(asymptotic_check(8.0 * 500.0) / asymptotic_check(500.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("oracle csv") {
    const PotentialSpec spec = PotentialSpec::anharmonic_table(0.0);
    const std::string csv = oracle_csv({richardson_refine(spec, oracle_default_grid(spec), 2)});
    CHECK(csv.rfind("lambda,level,eigenvalue_raw,eigenvalue_refined,grid_n,L\n", 0) == 0);
    CHECK(csv.find("\n0,1,") != std::string::npos);
}
