#ifndef NNOSC_TRAINER_HPP
#define NNOSC_TRAINER_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnosc/ansatz.hpp"
#include "nnosc/network.hpp"
#include "nnosc/operators.hpp"

namespace nnosc {

/// Raised when the trial function's norm drops below kCollapseNorm, making the
/// residual quotient meaningless.
class CollapsedTrialError : public std::runtime_error {
public:
    explicit CollapsedTrialError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kCollapseNorm = 1e-14;

struct TrainingConfig {
    PotentialSpec spec = PotentialSpec::harmonic_half();
    CollocationGrid grid = default_training_grid(PotentialSpec::harmonic_half());
    /// Grid for the final Rayleigh check; defaults to default_report_grid(spec).
    std::optional<CollocationGrid> report_grid;
    /// Initial value of the trainable energy. Unset: the minimum of the potential (0), a
    /// strict lower bound of the spectrum, so the warm-up below selects the ground state.
    std::optional<double> pretrain_energy;
    /// Iterations at the start during which E stays at the pretrain value and only the
    /// network moves. Minimizing |(H - E0) psi|^2 pulls the trial toward the eigenstate
    /// whose energy is nearest E0. When the warm-up ends (at once if this is 0) E jumps to
    /// its optimum for the current trial.
    int pretrain_iters = 2000;
    std::uint64_t seed = 7;
    std::vector<std::size_t> hidden_sizes{10};
    /// Unset: default_envelope_alpha(spec).
    std::optional<double> envelope_alpha;
    int max_iters = 20000;
    /// Converged once loss / max(1, E^2) < tol. The residual term has units of energy^2,
    /// so the scaled loss is the squared relative energy spread of the trial.
    double tol = 1e-3;
    double learning_rate = 1e-2;
    /// Learning rate is multiplied by this factor once per lr_decay_every iterations.
    double lr_decay = 0.5;
    int lr_decay_every = 5000;
    double norm_weight = 1.0;
    double ortho_weight = 10.0;
    std::vector<TrialWavefunction> frozen_lower_states;
    /// Loss trace sampling period (iterations).
    int trace_every = 100;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    double alpha() const;
    CollocationGrid effective_report_grid() const;
};

/// Training defaults for one potential: training grid, envelope and report grid from the ansatz defaults.
TrainingConfig default_training_config(const PotentialSpec& spec);

struct TracePoint {
    int iteration = 0;
    double loss = 0.0;
    double energy = 0.0;
};

/// Loss terms for a trial and energy on cfg.grid.
struct LossBreakdown {
    double residual = 0.0;  // sum w (H psi - E psi)^2 / norm
    double norm_penalty = 0.0;
    double ortho_penalty = 0.0;  // ortho_weight sum overlap^2 / norm
    double norm_squared = 0.0;
    double total() const { return residual + norm_penalty + ortho_penalty; }
};

/// loss / max(1, energy^2).
double scaled_loss(double loss, double energy);

struct TrainingReport {
    double final_energy = 0.0;
    double final_loss = 0.0;
    /// scaled_loss(final_loss, final_energy); converged implies this is below tol.
    double final_scaled_loss = 0.0;
    LossBreakdown final_terms;
    int iterations_used = 0;
    std::vector<TracePoint> loss_trace;
    bool converged = false;
    double rayleigh_check = 0.0;
    double pretrain_energy = 0.0;
    /// Set when training stopped on a collapsed trial; names the iteration.
    std::optional<std::string> fault;

    double rayleigh_gap() const;
};

struct LossGradient {
    LossBreakdown loss;
    std::vector<double> params;  // d loss / d network parameters
    double energy = 0.0;         // d loss / d E
};

/// residual / norm + norm_weight (norm - 1)^2 + ortho_weight sum_k overlap(trial, frozen_k)^2 / norm,
/// with norm = norm_squared(trial) on cfg.grid. Dividing the overlap term by the norm keeps it
/// from being lowered by shrinking the trial; at unit norm it is the plain squared overlap.
/// Throws CollapsedTrialError when the norm is below kCollapseNorm.
LossBreakdown residual_loss_terms(const TrialWavefunction& trial, double energy, const TrainingConfig& cfg);
double residual_loss(const TrialWavefunction& trial, double energy, const TrainingConfig& cfg);
LossGradient residual_loss_gradient(const TrialWavefunction& trial, double energy, const TrainingConfig& cfg);

/// <psi|H|psi> / <psi|psi> by trapezoid on grid with analytic psi''.
/// Throws CollapsedTrialError for a collapsed trial.
double rayleigh_quotient(const TrialWavefunction& trial, const PotentialSpec& spec, const CollocationGrid& grid);

struct TrainedLevel {
    TrialWavefunction trial;
    TrainingReport report;
};

/// Adam descent on the network parameters; after the warm-up E follows its exact minimizer.
/// Bit-deterministic for identical inputs.
/// Non-convergence and collapse are reported, not thrown.
TrainedLevel train_level(const TrainingConfig& cfg, const NetworkParams& init);

struct LevelResult {
    TrialWavefunction trial;
    TrainingReport report;
    int level = 0;
    double energy = 0.0;
    double rayleigh = 0.0;
    bool converged = false;
    std::string note;
};

struct SpectrumOptions {
    /// Seed pretrain energies from the finite-difference oracle; otherwise previous level + 2.
    bool oracle_pretrain = true;
    /// pretrain_iters used for levels with an explicit pretrain energy.
    int pretrain_iters = 2000;
    /// Warm-up candidates per excited level (seeds seed + 1000 k); the one with the lowest loss is
    /// trained on. Level 0 always uses a single run.
    int restarts = 4;
};

/// Trains levels 0..n_levels-1 in turn, each deflated against all lower converged states.
/// Level n uses seed cfg_template.seed + n. Results sorted by energy.
std::vector<LevelResult> solve_spectrum(const PotentialSpec& spec, int n_levels, const TrainingConfig& cfg_template,
                                        const SpectrumOptions& options = {});

/// Three-column CSV "iteration,loss,E".
std::string trace_csv(const TrainingReport& report);

}  // namespace nnosc

#endif  // NNOSC_TRAINER_HPP
