#ifndef NNOSC_OPERATORS_HPP
#define NNOSC_OPERATORS_HPP

namespace nnosc {

/// One-dimensional Schrodinger operator
///   H = -kinetic_coeff * d^2/dx^2 + quad_coeff * x^2 + lambda * x^4
/// in units hbar = m = w = 1.
class PotentialSpec {
public:
    /// Throws std::invalid_argument unless kinetic_coeff > 0, quad_coeff >= 0, lambda >= 0.
    PotentialSpec(double kinetic_coeff, double quad_coeff, double lambda);

    /// -1/2 psi'' + 1/2 x^2 psi; exact levels n + 1/2.
    static PotentialSpec harmonic_half();

    /// -psi'' + x^2 psi + lambda x^4 psi. This is the normalization under which the
    /// tabulated anharmonic ground states tend to 1 as lambda -> 0, so it is the
    /// convention used for every anharmonic comparison in the library.
    static PotentialSpec anharmonic_table(double lambda);

    double kinetic_coeff() const { return kinetic_; }
    double quad_coeff() const { return quad_; }
    double lambda() const { return lambda_; }

    bool operator==(const PotentialSpec&) const = default;

private:
    double kinetic_;
    double quad_;
    double lambda_;
};

/// A trial function sampled at x together with its first two derivatives.
struct DifferentiablePoint {
    double x = 0.0;
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    bool finite() const;
};

double potential_value(const PotentialSpec& spec, double x);

/// (H psi)(x) from psi, psi'' at x.
double apply_hamiltonian(const PotentialSpec& spec, const DifferentiablePoint& p);

/// n + 1/2 (harmonic_half convention).
double harmonic_exact_level(int n);

/// Multiplies an energy by a normalization factor, e.g. 2 when comparing against
/// references that use H = p^2/2 + x^2/2 + lambda x^4/2.
double rescale_convention(double energy, double factor);

}  // namespace nnosc

#endif  // NNOSC_OPERATORS_HPP
