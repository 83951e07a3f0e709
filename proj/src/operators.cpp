#include "nnosc/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nnosc {

PotentialSpec::PotentialSpec(double kinetic_coeff, double quad_coeff, double lambda)
    : kinetic_(kinetic_coeff), quad_(quad_coeff), lambda_(lambda) {
    if (!(std::isfinite(kinetic_coeff) && kinetic_coeff > 0.0)) {
        throw std::invalid_argument("kinetic_coeff must be finite and > 0, got " +
                                    std::to_string(kinetic_coeff));
    }
    if (!(std::isfinite(quad_coeff) && quad_coeff >= 0.0)) {
        throw std::invalid_argument("quad_coeff must be finite and >= 0, got " +
                                    std::to_string(quad_coeff));
    }
    if (!(std::isfinite(lambda) && lambda >= 0.0)) {
        throw std::invalid_argument("lambda must be finite and >= 0 (spectrum unbounded below), got " +
                                    std::to_string(lambda));
    }
}

PotentialSpec PotentialSpec::harmonic_half() { return PotentialSpec(0.5, 0.5, 0.0); }

PotentialSpec PotentialSpec::anharmonic_table(double lambda) { return PotentialSpec(1.0, 1.0, lambda); }

bool DifferentiablePoint::finite() const {
    return std::isfinite(x) && std::isfinite(value) && std::isfinite(d1) && std::isfinite(d2);
}

double potential_value(const PotentialSpec& spec, double x) {
    const double x2 = x * x;
    return spec.quad_coeff() * x2 + spec.lambda() * x2 * x2;
}

double apply_hamiltonian(const PotentialSpec& spec, const DifferentiablePoint& p) {
    return -spec.kinetic_coeff() * p.d2 + potential_value(spec, p.x) * p.value;
}

double harmonic_exact_level(int n) {
    if (n < 0) {
        throw std::invalid_argument("level index must be >= 0");
    }
    return n + 0.5;
}

double rescale_convention(double energy, double factor) {
    if (factor == 0.0) {
        throw std::invalid_argument("convention factor must be nonzero");
    }
    return energy * factor;
}

}  // namespace nnosc
