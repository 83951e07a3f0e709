#include "nnosc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nnosc/format.hpp"
#include "nnosc/oracle.hpp"

namespace nnosc {

void TrainingConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("training config: " + field + " " + why);
    };
    if (max_iters < 1) fail("max_iters", "must be >= 1");
    if (!(tol > 0.0)) fail("tol", "must be > 0");
    if (!(learning_rate > 0.0)) fail("learning_rate", "must be > 0");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) fail("lr_decay", "must be in (0, 1]");
    if (lr_decay_every < 1) fail("lr_decay_every", "must be >= 1");
    if (!(norm_weight >= 0.0)) fail("norm_weight", "must be >= 0");
    if (!(ortho_weight >= 0.0)) fail("ortho_weight", "must be >= 0");
    if (pretrain_iters < 0) fail("pretrain_iters", "must be >= 0");
    if (trace_every < 1) fail("trace_every", "must be >= 1");
    if (hidden_sizes.empty()) fail("hidden_sizes", "must name at least one layer");
    if (envelope_alpha && !(*envelope_alpha > 0.0)) fail("envelope_alpha", "must be > 0");
    if (pretrain_energy && !std::isfinite(*pretrain_energy)) fail("pretrain_energy", "must be finite");
}

double TrainingConfig::alpha() const { return envelope_alpha ? *envelope_alpha : default_envelope_alpha(spec); }

CollocationGrid TrainingConfig::effective_report_grid() const {
    return report_grid ? *report_grid : default_report_grid(spec);
}

TrainingConfig default_training_config(const PotentialSpec& spec) {
    TrainingConfig cfg;
    cfg.spec = spec;
    cfg.grid = default_training_grid(spec);
    return cfg;
}

namespace {
constexpr double kRenormLow = 0.5;
constexpr double kRenormHigh = 2.0;
}  // namespace

double scaled_loss(double loss, double energy) { return loss / std::max(1.0, energy * energy); }

double TrainingReport::rayleigh_gap() const { return std::fabs(final_energy - rayleigh_check); }

namespace {

// Per-grid quantities that stay fixed for a whole training run.
class LossContext {
public:
    explicit LossContext(const TrainingConfig& cfg)
        : cfg_(cfg), xs_(cfg.grid.points()), w_(cfg.grid.weights()), v_(xs_.size()) {
        for (std::size_t i = 0; i < xs_.size(); ++i) v_[i] = potential_value(cfg.spec, xs_[i]);
        for (const auto& state : cfg.frozen_lower_states) frozen_.push_back(sample(state, cfg.grid));
    }

    LossBreakdown terms(const TrialWavefunction& trial, double energy) const {
        const std::size_t n = xs_.size();
        std::vector<double> psi(n);
        double s = 0.0, r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const DifferentiablePoint p = psi_eval(trial, xs_[i]);
            const double r = apply_hamiltonian(cfg_.spec, p) - energy * p.value;
            psi[i] = p.value;
            s += w_[i] * p.value * p.value;
            r2 += w_[i] * r * r;
        }
        check_norm(s);
        LossBreakdown out;
        out.norm_squared = s;
        out.residual = r2 / s;
        out.norm_penalty = cfg_.norm_weight * (s - 1.0) * (s - 1.0);
        for (const auto& phi : frozen_) {
            double o = 0.0;
            for (std::size_t i = 0; i < n; ++i) o += w_[i] * psi[i] * phi[i];
            out.ortho_penalty += cfg_.ortho_weight * o * o / s;
        }
        return out;
    }

    LossGradient gradient(const TrialWavefunction& trial, double energy) const {
        const std::size_t n = xs_.size();
        const double k = cfg_.spec.kinetic_coeff();
        const NetworkParams& net = trial.net();
        tapes_.resize(n);

        // Pass 1: jets at every point.
        std::vector<double> psi(n), res(n);
        std::vector<EnvelopeFactors> fac(n);
        double s = 0.0, r2 = 0.0, r_psi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = xs_[i];
            fac[i] = envelope_factors(trial, x);
            const auto jet = tapes_[i].forward(net, trial.input_scale() * x);
            const EnvelopeFactors& f = fac[i];
            psi[i] = jet[0] * f.env;
            const double d2 = (f.d2_dxx * jet[2] + f.d2_dx * jet[1] + f.d2_value * jet[0]) * f.env;
            res[i] = -k * d2 + (v_[i] - energy) * psi[i];
            s += w_[i] * psi[i] * psi[i];
            r2 += w_[i] * res[i] * res[i];
            r_psi += w_[i] * res[i] * psi[i];
        }
        check_norm(s);
        std::vector<double> overlaps(frozen_.size(), 0.0);
        for (std::size_t f = 0; f < frozen_.size(); ++f) {
            for (std::size_t i = 0; i < n; ++i) overlaps[f] += w_[i] * psi[i] * frozen_[f][i];
        }

        LossGradient out;
        out.loss.norm_squared = s;
        out.loss.residual = r2 / s;
        out.loss.norm_penalty = cfg_.norm_weight * (s - 1.0) * (s - 1.0);
        double overlap_sq = 0.0;
        for (double o : overlaps) overlap_sq += o * o;
        out.loss.ortho_penalty = cfg_.ortho_weight * overlap_sq / s;
        out.energy = -2.0 * r_psi / s;

        // Pass 2: each point contributes c_value dpsi + c_d2 dpsi''; fold into one seeded sweep.
        const double ds_coeff =
            -(r2 + cfg_.ortho_weight * overlap_sq) / (s * s) + 2.0 * cfg_.norm_weight * (s - 1.0);
        out.params.assign(net.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const EnvelopeFactors& f = fac[i];
            if (f.env == 0.0) continue;
            double c_value = 2.0 * w_[i] * res[i] * (v_[i] - energy) / s;
            c_value += ds_coeff * 2.0 * w_[i] * psi[i];
            for (std::size_t f = 0; f < frozen_.size(); ++f) {
                c_value += 2.0 * cfg_.ortho_weight * overlaps[f] * w_[i] * frozen_[f][i] / s;
            }
            const double c_d2 = 2.0 * w_[i] * res[i] * (-k) / s;
            const std::array<double, 3> seed{f.env * (c_value + c_d2 * f.d2_value), f.env * c_d2 * f.d2_dx,
                                             f.env * c_d2 * f.d2_dxx};
            tapes_[i].accumulate_gradient(net, seed, out.params);
        }
        return out;
    }

private:
    static void check_norm(double s) {
        if (!(s >= kCollapseNorm)) {
            throw CollapsedTrialError("trial norm " + format_real(s) + " below " + format_real(kCollapseNorm));
        }
    }

    const TrainingConfig& cfg_;
    std::vector<double> xs_;
    std::vector<double> w_;
    std::vector<double> v_;
    std::vector<std::vector<double>> frozen_;
    mutable std::vector<JetTape> tapes_;
};

// Adam with bias correction; beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
class Adam {
public:
    explicit Adam(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}

    void step(std::span<double> params, std::span<const double> grad, double lr) {
        ++t_;
        const double c1 = 1.0 - std::pow(kBeta1, t_);
        const double c2 = 1.0 - std::pow(kBeta2, t_);
        for (std::size_t j = 0; j < params.size(); ++j) {
            m_[j] = kBeta1 * m_[j] + (1.0 - kBeta1) * grad[j];
            v_[j] = kBeta2 * v_[j] + (1.0 - kBeta2) * grad[j] * grad[j];
            params[j] -= lr * (m_[j] / c1) / (std::sqrt(v_[j] / c2) + kEps);
        }
    }

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;
    std::vector<double> m_;
    std::vector<double> v_;
    int t_ = 0;
};

}  // namespace

LossBreakdown residual_loss_terms(const TrialWavefunction& trial, double energy, const TrainingConfig& cfg) {
    return LossContext(cfg).terms(trial, energy);
}

double residual_loss(const TrialWavefunction& trial, double energy, const TrainingConfig& cfg) {
    return residual_loss_terms(trial, energy, cfg).total();
}

LossGradient residual_loss_gradient(const TrialWavefunction& trial, double energy, const TrainingConfig& cfg) {
    return LossContext(cfg).gradient(trial, energy);
}

double rayleigh_quotient(const TrialWavefunction& trial, const PotentialSpec& spec, const CollocationGrid& grid) {
    const auto w = grid.weights();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid.n_points(); ++i) {
        const DifferentiablePoint p = psi_eval(trial, grid.point(i));
        num += w[i] * p.value * apply_hamiltonian(spec, p);
        den += w[i] * p.value * p.value;
    }
    if (!(den >= kCollapseNorm)) {
        throw CollapsedTrialError("Rayleigh quotient of a collapsed trial (norm " + format_real(den) + ")");
    }
    return num / den;
}

TrainedLevel train_level(const TrainingConfig& cfg, const NetworkParams& init) {
    cfg.validate();
    if (init.hidden_sizes() != cfg.hidden_sizes) {
        throw std::invalid_argument("initial network shape does not match hidden_sizes");
    }
    TrialWavefunction trial(init, cfg.alpha());
    const LossContext ctx(cfg);

    TrainingReport report;
    double energy = cfg.pretrain_energy ? *cfg.pretrain_energy : 0.0;
    report.pretrain_energy = energy;

    Adam net_opt(trial.net().size());
    double lr = cfg.learning_rate;

    int iter = 0;
    try {
        for (; iter < cfg.max_iters; ++iter) {
            if (iter > 0 && iter % cfg.lr_decay_every == 0) lr *= cfg.lr_decay;
            if (iter == cfg.pretrain_iters) {
                // Release E at its optimum for the current trial: argmin_E |(H - E) psi|^2.
                energy = rayleigh_quotient(trial, cfg.spec, cfg.grid);
            }
            const LossGradient g = ctx.gradient(trial, energy);
            const double loss = g.loss.total();
            report.final_loss = loss;
            if (iter % cfg.trace_every == 0) report.loss_trace.push_back({iter, loss, energy});
            if (scaled_loss(loss, energy) < cfg.tol && iter >= cfg.pretrain_iters) {
                report.converged = true;
                break;
            }
            net_opt.step(trial.net().values(), g.params, lr);
            // Residual and deflation terms are scale-invariant, so nothing but the norm penalty
            // holds the amplitude; pull it back before the trial can drift toward zero.
            if (g.loss.norm_squared < kRenormLow || g.loss.norm_squared > kRenormHigh) {
                trial = trial.scaled(1.0 / std::sqrt(g.loss.norm_squared));
            }
            // The loss is quadratic in E with curvature exactly 2, so one Newton step lands on the optimum.
            if (iter >= cfg.pretrain_iters) energy -= 0.5 * g.energy;
        }
        report.final_terms = ctx.terms(trial, energy);
        if (!report.converged) {
            report.final_loss = report.final_terms.total();
            report.converged = scaled_loss(report.final_loss, energy) < cfg.tol;
        }
        report.iterations_used = report.converged ? iter : cfg.max_iters;
        report.rayleigh_check = rayleigh_quotient(trial, cfg.spec, cfg.effective_report_grid());
    } catch (const CollapsedTrialError& e) {
        report.converged = false;
        report.iterations_used = iter;
        report.fault = "collapsed trial at iteration " + std::to_string(iter) + ": " + e.what();
        report.rayleigh_check = std::nan("");
    }
    report.final_energy = energy;
    report.final_scaled_loss = scaled_loss(report.final_loss, energy);
    if (report.loss_trace.empty() || report.loss_trace.back().iteration != report.iterations_used) {
        report.loss_trace.push_back({report.iterations_used, report.final_loss, energy});
    }
    return {std::move(trial), std::move(report)};
}

namespace {

constexpr std::uint64_t kRestartSeedStride = 1000;

// Runs the warm-up from several seeds and continues only the candidate with the lowest loss.
TrainedLevel train_with_restarts(const TrainingConfig& cfg, int restarts) {
    if (restarts <= 1 || cfg.pretrain_iters <= 0 || cfg.pretrain_iters >= cfg.max_iters) {
        return train_level(cfg, init_params(cfg.hidden_sizes, cfg.seed));
    }
    TrainingConfig warm = cfg;
    warm.max_iters = cfg.pretrain_iters;
    std::optional<TrainedLevel> best;
    for (int k = 0; k < restarts; ++k) {
        warm.seed = cfg.seed + kRestartSeedStride * static_cast<std::uint64_t>(k);
        TrainedLevel t = train_level(warm, init_params(cfg.hidden_sizes, warm.seed));
        if (t.report.fault) continue;
        if (!best || t.report.final_loss < best->report.final_loss) best = std::move(t);
    }
    if (!best) return train_level(cfg, init_params(cfg.hidden_sizes, cfg.seed));

    TrainingConfig rest = cfg;
    rest.pretrain_iters = 0;
    rest.max_iters = cfg.max_iters - cfg.pretrain_iters;
    TrainedLevel t = train_level(rest, best->trial.net());
    std::vector<TracePoint> trace = best->report.loss_trace;
    if (!trace.empty() && trace.back().iteration == cfg.pretrain_iters) trace.pop_back();
    for (TracePoint p : t.report.loss_trace) {
        p.iteration += cfg.pretrain_iters;
        trace.push_back(p);
    }
    t.report.loss_trace = std::move(trace);
    t.report.iterations_used += cfg.pretrain_iters;
    t.report.pretrain_energy = best->report.pretrain_energy;
    if (t.report.fault) t.report.fault = "after warm-up: " + *t.report.fault;
    return t;
}

}  // namespace

std::vector<LevelResult> solve_spectrum(const PotentialSpec& spec, int n_levels, const TrainingConfig& cfg_template,
                                        const SpectrumOptions& options) {
    if (n_levels < 1) {
        throw std::invalid_argument("n_levels must be >= 1");
    }
    std::vector<double> oracle;
    if (options.oracle_pretrain) {
        const CollocationGrid g = oracle_default_grid(spec);
        oracle = fd_eigenvalues(spec, CollocationGrid(g.half_width(), std::max(2001, 10 * n_levels)), n_levels)
                     .eigenvalues;
    }

    std::vector<LevelResult> out;
    std::vector<TrialWavefunction> frozen;
    bool chain_ok = true;
    for (int n = 0; n < n_levels; ++n) {
        TrainingConfig cfg = cfg_template;
        cfg.spec = spec;
        cfg.seed = cfg_template.seed + static_cast<std::uint64_t>(n);
        cfg.frozen_lower_states = frozen;
        if (!cfg_template.pretrain_energy || n > 0) {
            if (!oracle.empty()) {
                cfg.pretrain_energy = oracle[n];
                cfg.pretrain_iters = options.pretrain_iters;
            } else if (n > 0) {
                cfg.pretrain_energy = out.back().energy + 2.0;
                cfg.pretrain_iters = options.pretrain_iters;
            }
        }
        TrainedLevel trained = train_with_restarts(cfg, n == 0 ? 1 : options.restarts);

        LevelResult level{.trial = trained.trial,
                          .report = {},
                          .level = n,
                          .energy = trained.report.final_energy,
                          .rayleigh = trained.report.rayleigh_check,
                          .converged = chain_ok && trained.report.converged,
                          .note = {}};
        if (trained.report.fault) {
            level.note = *trained.report.fault;
        } else if (!trained.report.converged) {
            level.note = "not converged after " + std::to_string(trained.report.iterations_used) + " iterations";
        } else if (!chain_ok) {
            level.note = "lower level not converged";
        }
        chain_ok = level.converged;
        level.report = std::move(trained.report);
        if (!level.report.fault) {
            frozen.push_back(normalized(level.trial, cfg.grid));
        }
        out.push_back(std::move(level));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LevelResult& a, const LevelResult& b) { return a.energy < b.energy; });
    for (int n = 0; n < n_levels; ++n) out[n].level = n;
    return out;
}

std::string trace_csv(const TrainingReport& report) {
    std::string out = "iteration,loss,E\n";
    for (const auto& t : report.loss_trace) {
        out += std::to_string(t.iteration) + "," + format_real(t.loss) + "," + format_real(t.energy) + "\n";
    }
    return out;
}

}  // namespace nnosc
