#include "nnosc/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nnosc/format.hpp"

namespace nnosc {

TrialWavefunction::TrialWavefunction(NetworkParams net, double envelope_alpha)
    : net_(std::move(net)), alpha_(envelope_alpha), scale_(std::sqrt(2.0 * envelope_alpha)) {
    if (!(std::isfinite(envelope_alpha) && envelope_alpha > 0.0)) {
        throw std::invalid_argument("envelope_alpha must be > 0");
    }
    if (!net_.all_finite()) {
        throw std::invalid_argument("network parameters must be finite");
    }
}

TrialWavefunction TrialWavefunction::scaled(double c) const {
    TrialWavefunction out = *this;
    const auto& layer = out.net_.output_layer();
    auto v = out.net_.values();
    for (std::size_t k = layer.weight_offset; k < layer.bias_offset + layer.out; ++k) {
        v[k] *= c;
    }
    return out;
}

CollocationGrid::CollocationGrid(double half_width, int n_points) : half_width_(half_width), n_points_(n_points) {
    if (!(std::isfinite(half_width) && half_width > 0.0)) {
        throw std::invalid_argument("grid half_width must be > 0");
    }
    if (n_points < 3) {
        throw std::invalid_argument("grid needs at least 3 points");
    }
}

double CollocationGrid::point(int i) const {
    // Integer offset times a shared step keeps the grid exactly symmetric about 0.
    return static_cast<double>(2 * i - (n_points_ - 1)) * (half_width_ / (n_points_ - 1));
}

std::vector<double> CollocationGrid::points() const {
    std::vector<double> xs(n_points_);
    for (int i = 0; i < n_points_; ++i) xs[i] = point(i);
    return xs;
}

std::vector<double> CollocationGrid::weights() const {
    std::vector<double> w(n_points_, spacing());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

double default_envelope_alpha(const PotentialSpec& spec) {
    const double k = spec.kinetic_coeff();
    const double harmonic = spec.quad_coeff() > 0.0 ? std::sqrt(spec.quad_coeff() / k) : 1.0;
    return 0.5 * std::max(harmonic, std::cbrt(spec.lambda() / k));
}

double default_half_width(const PotentialSpec& spec) {
    const double l = 6.0 / std::max(1.0, std::pow(spec.lambda(), 1.0 / 6.0));
    return std::clamp(l, 3.0, 8.0);
}

CollocationGrid default_training_grid(const PotentialSpec& spec) {
    return CollocationGrid(default_half_width(spec), kTrainingGridPoints);
}

CollocationGrid default_report_grid(const PotentialSpec& spec) {
    return CollocationGrid(default_half_width(spec), kReportGridPoints);
}

EnvelopeFactors envelope_factors(const TrialWavefunction& trial, double x) {
    const double a = trial.envelope_alpha();
    const double s = trial.input_scale();
    return {std::exp(-a * x * x), s, -4.0 * a * x * s, s * s, 4.0 * a * a * x * x - 2.0 * a, -2.0 * a * x};
}

DifferentiablePoint psi_eval(const TrialWavefunction& trial, double x) {
    const EnvelopeFactors f = envelope_factors(trial, x);
    DifferentiablePoint p;
    p.x = x;
    if (f.env == 0.0) return p;
    const NetEval n = forward_jet(trial.net(), trial.input_scale() * x);
    p.value = n.value * f.env;
    p.d1 = (f.d1_dx * n.dx + f.d1_value * n.value) * f.env;
    p.d2 = (f.d2_dxx * n.dxx + f.d2_dx * n.dx + f.d2_value * n.value) * f.env;
    return p;
}

PsiParamGrad psi_eval_with_param_grad(const TrialWavefunction& trial, double x) {
    const NetEval n = forward_with_derivatives(trial.net(), trial.input_scale() * x);
    const EnvelopeFactors f = envelope_factors(trial, x);

    PsiParamGrad out;
    out.point.x = x;
    out.point.value = n.value * f.env;
    out.point.d1 = (f.d1_dx * n.dx + f.d1_value * n.value) * f.env;
    out.point.d2 = (f.d2_dxx * n.dxx + f.d2_dx * n.dx + f.d2_value * n.value) * f.env;
    out.grad_value.resize(n.grad_value.size());
    out.grad_d2.resize(n.grad_value.size());
    for (std::size_t k = 0; k < n.grad_value.size(); ++k) {
        out.grad_value[k] = n.grad_value[k] * f.env;
        out.grad_d2[k] = (f.d2_dxx * n.grad_dxx[k] + f.d2_dx * n.grad_dx[k] + f.d2_value * n.grad_value[k]) * f.env;
    }
    return out;
}

std::vector<double> sample(const TrialWavefunction& trial, const CollocationGrid& grid) {
    std::vector<double> values(grid.n_points());
    for (int i = 0; i < grid.n_points(); ++i) {
        values[i] = psi_eval(trial, grid.point(i)).value;
    }
    return values;
}

double trapezoid(const std::vector<double>& samples, const CollocationGrid& grid) {
    if (samples.size() != static_cast<std::size_t>(grid.n_points())) {
        throw std::invalid_argument("sample count does not match grid");
    }
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) interior += samples[i];
    return grid.spacing() * (interior + 0.5 * (samples.front() + samples.back()));
}

double norm_squared(const TrialWavefunction& trial, const CollocationGrid& grid) {
    auto psi = sample(trial, grid);
    for (double& v : psi) v *= v;
    return trapezoid(psi, grid);
}

double overlap(const TrialWavefunction& a, const TrialWavefunction& b, const CollocationGrid& grid) {
    const auto pa = sample(a, grid);
    const auto pb = sample(b, grid);
    std::vector<double> prod(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) prod[i] = pa[i] * pb[i];
    return trapezoid(prod, grid);
}

TrialWavefunction normalized(const TrialWavefunction& trial, const CollocationGrid& grid) {
    const double n2 = norm_squared(trial, grid);
    if (!(n2 > 1e-14)) {
        throw std::domain_error("cannot normalize a collapsed trial function");
    }
    return trial.scaled(1.0 / std::sqrt(n2));
}

std::string wavefunction_csv(const TrialWavefunction& trial, const CollocationGrid& grid) {
    std::string out = "x,psi\n";
    for (int i = 0; i < grid.n_points(); ++i) {
        const double x = grid.point(i);
        out += format_real(x) + "," + format_real(psi_eval(trial, x).value) + "\n";
    }
    return out;
}

}  // namespace nnosc
