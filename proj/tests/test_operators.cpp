#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "nnosc/operators.hpp"

using namespace nnosc;

namespace {

DifferentiablePoint gaussian(double x) {
    const double g = std::exp(-0.5 * x * x);
    return {x, g, -x * g, (x * x - 1.0) * g};
}

}  // namespace

TEST_CASE("potential values") {
    CHECK(potential_value(PotentialSpec::anharmonic_table(0.0), 2.0) == 4.0);
    CHECK(potential_value(PotentialSpec::anharmonic_table(0.1), 1.0) == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(potential_value(PotentialSpec::harmonic_half(), 3.0) == 4.5);
}

TEST_CASE("potential is even") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    const PotentialSpec spec(1.3, 0.7, 2.5);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        CHECK(potential_value(spec, x) == potential_value(spec, -x));
    }
}

TEST_CASE("hamiltonian on the gaussian") {
    for (double x : {-3.0, -0.5, 0.0, 0.25, 1.0, 4.0}) {
        const DifferentiablePoint p = gaussian(x);
        CHECK(apply_hamiltonian(PotentialSpec::anharmonic_table(0.0), p) == doctest::Approx(p.value).epsilon(1e-14));
        CHECK(apply_hamiltonian(PotentialSpec::harmonic_half(), p) == doctest::Approx(0.5 * p.value).epsilon(1e-14));
    }
    // (1 + 0.1 x^4) e^{-x^2/2} at x = 1
    CHECK(apply_hamiltonian(PotentialSpec::anharmonic_table(0.1), gaussian(1.0)) ==
          doctest::Approx(0.66718372568389677).epsilon(1e-14));
}

TEST_CASE("gaussian eigen-ratio is one wherever psi is resolvable") {
    const PotentialSpec spec = PotentialSpec::anharmonic_table(0.0);
    for (double x = -7.0; x <= 7.0; x += 0.01) {
        const DifferentiablePoint p = gaussian(x);
        if (std::fabs(p.value) <= 1e-12) continue;
        CHECK(apply_hamiltonian(spec, p) / p.value == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("hamiltonian is linear in the trial") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const PotentialSpec spec(0.8, 1.1, 0.3);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng), a = u(rng), b = u(rng);
        const DifferentiablePoint p{x, u(rng), u(rng), u(rng)};
        const DifferentiablePoint q{x, u(rng), u(rng), u(rng)};
        const DifferentiablePoint mix{x, a * p.value + b * q.value, a * p.d1 + b * q.d1, a * p.d2 + b * q.d2};
        CHECK(apply_hamiltonian(spec, mix) ==
              doctest::Approx(a * apply_hamiltonian(spec, p) + b * apply_hamiltonian(spec, q)).epsilon(1e-12));
    }
}

TEST_CASE("harmonic levels") {
    CHECK(harmonic_exact_level(0) == 0.5);
    CHECK(harmonic_exact_level(1) == 1.5);
    CHECK(harmonic_exact_level(5) == 5.5);
    CHECK_THROWS_AS(harmonic_exact_level(-1), std::invalid_argument);
}

TEST_CASE("convention rescaling") {
    CHECK(rescale_convention(0.620099, 2.0) == doctest::Approx(1.240198).epsilon(1e-15));
    CHECK(rescale_convention(1.0, 1.0) == 1.0);
    CHECK(rescale_convention(4.9580018282 / 2.0, 2.0) == doctest::Approx(4.9580018282).epsilon(1e-15));
    CHECK_THROWS_AS(rescale_convention(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(PotentialSpec(0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec(-1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec(1.0, -1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec::anharmonic_table(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec(1.0, 1.0, NAN), std::invalid_argument);
    const PotentialSpec h = PotentialSpec::harmonic_half();
    CHECK(h.kinetic_coeff() == 0.5);
    CHECK(h.quad_coeff() == 0.5);
    CHECK(h.lambda() == 0.0);
}

TEST_CASE("differentiable point finiteness") {
    CHECK(DifferentiablePoint{0.0, 1.0, 0.0, -1.0}.finite());
    CHECK_FALSE(DifferentiablePoint{0.0, NAN, 0.0, 0.0}.finite());
    CHECK_FALSE(DifferentiablePoint{INFINITY, 1.0, 0.0, 0.0}.finite());
}
