#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "nnosc/oracle.hpp"
#include "nnosc/trainer.hpp"

using namespace nnosc;

namespace {

// pi^{-1/4} e^{-x^2/2}: the normalized harmonic ground state.
TrialWavefunction harmonic_ground() {
    NetworkParams p({1});
    p.bias(1, 0) = std::pow(M_PI, -0.25);
    return TrialWavefunction(p, 0.5);
}

TrialWavefunction gaussian(double amplitude = 1.0) {
    NetworkParams p({1});
    p.bias(1, 0) = amplitude;
    return TrialWavefunction(p, 0.5);
}

TrialWavefunction random_trial(std::uint64_t seed, double alpha) {
    NetworkParams p = init_params({6}, seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (double& v : p.values()) v = u(rng);
    return TrialWavefunction(p, alpha);
}

}  // namespace

TEST_CASE("residual loss at and near an exact eigenpair") {
    const TrainingConfig cfg = default_training_config(PotentialSpec::harmonic_half());
    CHECK(residual_loss(harmonic_ground(), 0.5, cfg) < 1e-8);
    const double off = residual_loss(harmonic_ground(), 0.6, cfg);
    CHECK(off > 1e-3);
    CHECK(off == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("self-overlap penalty") {
    TrainingConfig cfg = default_training_config(PotentialSpec::harmonic_half());
    cfg.frozen_lower_states = {harmonic_ground()};
    const LossBreakdown t = residual_loss_terms(harmonic_ground(), 0.5, cfg);
    CHECK(t.ortho_penalty == doctest::Approx(cfg.ortho_weight * t.norm_squared).epsilon(1e-10));
    CHECK(t.ortho_penalty > 0.0);
}

TEST_CASE("loss terms are non-negative") {
    TrainingConfig cfg = default_training_config(PotentialSpec::anharmonic_table(0.3));
    cfg.frozen_lower_states = {random_trial(99, 0.5)};
    for (std::uint64_t s = 0; s < 20; ++s) {
        const LossBreakdown t = residual_loss_terms(random_trial(s, 0.5), 1.0 + 0.3 * s, cfg);
        CHECK(t.residual >= 0.0);
        CHECK(t.norm_penalty >= 0.0);
        CHECK(t.ortho_penalty >= 0.0);
    }
}

TEST_CASE("collapsed trial is rejected") {
    const TrainingConfig cfg = default_training_config(PotentialSpec::harmonic_half());
    CHECK_THROWS_AS(residual_loss(gaussian(0.0), 0.5, cfg), CollapsedTrialError);
    CHECK_THROWS_AS(rayleigh_quotient(gaussian(0.0), cfg.spec, cfg.grid), CollapsedTrialError);
}

TEST_CASE("loss gradient against finite differences") {
    TrainingConfig cfg = default_training_config(PotentialSpec::anharmonic_table(0.1));
    cfg.frozen_lower_states = {normalized(random_trial(3, 0.5), cfg.grid), normalized(random_trial(4, 0.5), cfg.grid)};
    const TrialWavefunction t = random_trial(5, 0.5);
    const double e = 2.3;
    const LossGradient g = residual_loss_gradient(t, e, cfg);
    CHECK(g.loss.total() == doctest::Approx(residual_loss(t, e, cfg)).epsilon(1e-12));

    // E enters quadratically, so the central difference is exact up to rounding.
    const double he = 1e-3;
    const double fe = (residual_loss(t, e + he, cfg) - residual_loss(t, e - he, cfg)) / (2 * he);
    CHECK(g.energy == doctest::Approx(fe).epsilon(1e-6));

    const double h = 1e-6;
    for (std::size_t k = 0; k < t.net().size(); ++k) {
        TrialWavefunction plus = t, minus = t;
        plus.net().values()[k] += h;
        minus.net().values()[k] -= h;
        const double fd = (residual_loss(plus, e, cfg) - residual_loss(minus, e, cfg)) / (2 * h);
        CHECK(std::fabs(g.params[k] - fd) <= 1e-4 * std::max(std::fabs(fd), 1e-3));
    }
}

TEST_CASE("rayleigh quotient") {
    const CollocationGrid g(10.0, 2001);
    CHECK(rayleigh_quotient(gaussian(), PotentialSpec::anharmonic_table(0.0), g) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rayleigh_quotient(gaussian(), PotentialSpec::anharmonic_table(0.1), g) ==
          doctest::Approx(1.075).epsilon(1e-8));
    const PotentialSpec spec = PotentialSpec::anharmonic_table(0.4);
    const TrialWavefunction t = random_trial(17, 0.6);
    const double base = rayleigh_quotient(t, spec, g);
    for (double c : {-3.0, 1e-3, 250.0}) {
        CHECK(std::fabs(rayleigh_quotient(t.scaled(c), spec, g) - base) <= 1e-12 * std::fabs(base));
    }
}

TEST_CASE("variational bound over random trials") {
    for (double lambda : {0.0, 0.1, 1.0}) {
        const PotentialSpec spec = PotentialSpec::anharmonic_table(lambda);
        const double e0 = richardson_refine(spec, oracle_default_grid(spec), 1).best()[0];
        const CollocationGrid g = default_report_grid(spec);
        for (std::uint64_t s = 0; s < 50; ++s) {
            const TrialWavefunction t = random_trial(1000 + s, 0.3 + 0.02 * s);
            CHECK(rayleigh_quotient(t, spec, g) >= e0 - 1e-4);
        }
    }
}

TEST_CASE("config validation names the field") {
    TrainingConfig cfg = default_training_config(PotentialSpec::harmonic_half());
    cfg.tol = 0.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("tol"), std::invalid_argument);
    cfg = default_training_config(PotentialSpec::harmonic_half());
    cfg.max_iters = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("max_iters"), std::invalid_argument);
    cfg = default_training_config(PotentialSpec::harmonic_half());
    cfg.learning_rate = -1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("learning_rate"), std::invalid_argument);
    cfg = default_training_config(PotentialSpec::harmonic_half());
    cfg.ortho_weight = -1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("ortho_weight"), std::invalid_argument);
    cfg = default_training_config(PotentialSpec::harmonic_half());
    CHECK_THROWS_AS(train_level(cfg, init_params({3}, 1)), std::invalid_argument);
}

TEST_CASE("harmonic ground state") {
    TrainingConfig cfg = default_training_config(PotentialSpec::harmonic_half());
    cfg.pretrain_energy = 0.4;
    const TrainedLevel r = train_level(cfg, init_params(cfg.hidden_sizes, 7));
    CHECK(r.report.converged);
    CHECK(r.report.final_scaled_loss < cfg.tol);
    CHECK(std::fabs(r.report.final_energy - 0.5) < 5e-3);
    CHECK(std::fabs(r.report.rayleigh_check - 0.5) < 5e-3);
    CHECK(r.report.rayleigh_gap() == doctest::Approx(std::fabs(r.report.final_energy - r.report.rayleigh_check)));
    CHECK(r.report.pretrain_energy == 0.4);
    CHECK_FALSE(r.report.loss_trace.empty());
    CHECK(r.report.loss_trace.back().iteration == r.report.iterations_used);

    TrainingConfig stiff = cfg;
    stiff.norm_weight *= 10.0;
    const TrainedLevel s = train_level(stiff, init_params(cfg.hidden_sizes, 7));
    CHECK(std::fabs(s.report.final_energy - r.report.final_energy) < 1e-4);
}

TEST_CASE("anharmonic ground and first excited state") {
    TrainingConfig cfg = default_training_config(PotentialSpec::anharmonic_table(0.1));
    cfg.pretrain_energy = 1.0;
    const TrainedLevel g = train_level(cfg, init_params(cfg.hidden_sizes, cfg.seed));
    CHECK(g.report.converged);
    CHECK(std::fabs(g.report.final_energy - 1.0652855) / 1.0652855 < 5e-3);

    TrainingConfig ex = cfg;
    ex.pretrain_energy = 3.2;
    ex.frozen_lower_states = {normalized(g.trial, cfg.grid)};
    const TrainedLevel e = train_level(ex, init_params(cfg.hidden_sizes, cfg.seed + 1));
    CHECK(std::fabs(e.report.final_energy - 3.306872) / 3.306872 < 1e-2);
}

TEST_CASE("training is bit-deterministic") {
    TrainingConfig cfg = default_training_config(PotentialSpec::anharmonic_table(1.0));
    cfg.max_iters = 2500;
    cfg.trace_every = 50;
    const TrainedLevel a = train_level(cfg, init_params(cfg.hidden_sizes, 3));
    const TrainedLevel b = train_level(cfg, init_params(cfg.hidden_sizes, 3));
    CHECK(a.trial.net() == b.trial.net());
    CHECK(a.report.final_energy == b.report.final_energy);
    CHECK(a.report.final_loss == b.report.final_loss);
    REQUIRE(a.report.loss_trace.size() == b.report.loss_trace.size());
    for (std::size_t i = 0; i < a.report.loss_trace.size(); ++i) {
        CHECK(a.report.loss_trace[i].loss == b.report.loss_trace[i].loss);
        CHECK(a.report.loss_trace[i].energy == b.report.loss_trace[i].energy);
    }
}

TEST_CASE("non-convergence and collapse are reported, not thrown") {
    TrainingConfig cfg = default_training_config(PotentialSpec::anharmonic_table(1.0));
    cfg.max_iters = 10;
    const TrainedLevel r = train_level(cfg, init_params(cfg.hidden_sizes, 1));
    CHECK_FALSE(r.report.converged);
    CHECK(r.report.iterations_used == 10);

    NetworkParams zero({10});
    const TrainedLevel z = train_level(default_training_config(PotentialSpec::harmonic_half()), zero);
    CHECK_FALSE(z.report.converged);
    REQUIRE(z.report.fault.has_value());
    CHECK(z.report.fault->find("iteration 0") != std::string::npos);
}

TEST_CASE("single-level spectrum is one training run") {
    const PotentialSpec spec = PotentialSpec::anharmonic_table(0.1);
    const TrainingConfig cfg = default_training_config(spec);
    const auto levels = solve_spectrum(spec, 1, cfg);
    REQUIRE(levels.size() == 1);

    TrainingConfig direct = cfg;
    direct.pretrain_energy = fd_eigenvalues(spec, CollocationGrid(oracle_default_grid(spec).half_width(), 2001), 1)
                                 .eigenvalues[0];
    direct.pretrain_iters = SpectrumOptions{}.pretrain_iters;
    const TrainedLevel r = train_level(direct, init_params(cfg.hidden_sizes, cfg.seed));
    CHECK(levels[0].energy == r.report.final_energy);
    CHECK(levels[0].converged == r.report.converged);
    CHECK_THROWS_AS(solve_spectrum(spec, 0, cfg), std::invalid_argument);
}

TEST_CASE("trace csv") {
    TrainingReport r;
    r.loss_trace = {{0, 2.5, 1.0}, {100, 0.5, 1.25}};
    CHECK(trace_csv(r) == "iteration,loss,E\n0,2.5,1\n100,0.5,1.25\n");
}
