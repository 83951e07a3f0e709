#ifndef NNOSC_ANSATZ_HPP
#define NNOSC_ANSATZ_HPP

#include <vector>

#include "nnosc/network.hpp"
#include "nnosc/operators.hpp"

namespace nnosc {

/// psi(x) = N(s x) * exp(-alpha x^2) with input scale s = sqrt(2 alpha).
/// The envelope makes psi vanish at +-infinity whatever the network does, so no
/// boundary penalty is needed. The input scale feeds the network x in units of the
/// envelope width; it is exactly 1 for alpha = 1/2.
class TrialWavefunction {
public:
    /// Throws std::invalid_argument unless alpha > 0 and the network is finite.
    TrialWavefunction(NetworkParams net, double envelope_alpha);

    const NetworkParams& net() const { return net_; }
    NetworkParams& net() { return net_; }
    double envelope_alpha() const { return alpha_; }
    double input_scale() const { return scale_; }

    /// Multiplies psi by c (scales the output layer weights and bias).
    TrialWavefunction scaled(double c) const;

private:
    NetworkParams net_;
    double alpha_;
    double scale_;
};

/// Uniform grid on [-L, L] including both endpoints.
class CollocationGrid {
public:
    /// Throws unless half_width > 0 and n_points >= 3.
    CollocationGrid(double half_width, int n_points);

    double half_width() const { return half_width_; }
    int n_points() const { return n_points_; }
    double spacing() const { return 2.0 * half_width_ / (n_points_ - 1); }
    double point(int i) const;
    std::vector<double> points() const;
    /// Trapezoid weights: h everywhere except h/2 at the two endpoints.
    std::vector<double> weights() const;

    bool operator==(const CollocationGrid&) const = default;

private:
    double half_width_;
    int n_points_;
};

/// Defaults that track the ground-state width: 1/2 * max(sqrt(q/k), (lambda/k)^(1/3)),
/// which is 1/2 * max(1, lambda^(1/3)) for the anharmonic_table convention.
double default_envelope_alpha(const PotentialSpec& spec);
/// 6 / max(1, lambda^(1/6)) clamped to [3, 8].
double default_half_width(const PotentialSpec& spec);
inline constexpr int kTrainingGridPoints = 401;
inline constexpr int kReportGridPoints = 4001;
CollocationGrid default_training_grid(const PotentialSpec& spec);
CollocationGrid default_report_grid(const PotentialSpec& spec);

DifferentiablePoint psi_eval(const TrialWavefunction& trial, double x);

/// Product-rule coefficients at x, with u = s x the network input:
///   psi   = env * N(u)
///   psi'  = env * (d1_dx N' + d1_value N)
///   psi'' = env * (d2_dxx N'' + d2_dx N' + d2_value N)
/// where primes on N are derivatives with respect to u.
struct EnvelopeFactors {
    double env;
    double d1_dx;
    double d2_dx;
    double d2_dxx;
    double d2_value;
    double d1_value;
};

EnvelopeFactors envelope_factors(const TrialWavefunction& trial, double x);

/// psi, psi'' and their gradients with respect to the network parameters.
struct PsiParamGrad {
    DifferentiablePoint point;
    std::vector<double> grad_value;
    std::vector<double> grad_d2;
};

PsiParamGrad psi_eval_with_param_grad(const TrialWavefunction& trial, double x);

/// psi sampled on every grid point.
std::vector<double> sample(const TrialWavefunction& trial, const CollocationGrid& grid);

/// Trapezoid rule for a vector of samples on grid.
double trapezoid(const std::vector<double>& samples, const CollocationGrid& grid);

double norm_squared(const TrialWavefunction& trial, const CollocationGrid& grid);
double overlap(const TrialWavefunction& a, const TrialWavefunction& b, const CollocationGrid& grid);

/// Copy rescaled to unit norm on grid. Throws if the norm is numerically zero.
TrialWavefunction normalized(const TrialWavefunction& trial, const CollocationGrid& grid);

/// Two-column CSV "x,psi" over grid.
std::string wavefunction_csv(const TrialWavefunction& trial, const CollocationGrid& grid);

}  // namespace nnosc

#endif  // NNOSC_ANSATZ_HPP
