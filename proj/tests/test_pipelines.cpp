// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "qdistill/pipelines.hpp"
#include "qdistill/serialize.hpp"

using namespace qdistill;

namespace {

constexpr double kDyadicScale = 70368744177664.0;  // 2^46, exact dyadics

ExperimentConfig noiseless_config(double eps, double lam, double tv) {
  ExperimentConfig cfg;
  cfg.epsilon = eps;
  cfg.lambda = lam;
  cfg.t_v = tv;
  cfg.acquisition_scale = kDyadicScale;
  cfg.method = TomoMethod::Linear;
  cfg.noise = Noise::None;
  return cfg;
}

}  // namespace

TEST_CASE("run_distill: the optimum filter produces a Bell state") {
  const ExperimentConfig cfg = noiseless_config(0.49, 0.0, 0.49 * 0.49);
  const DistillationReport rep = run_distill(cfg);
  CHECK(rep.distilled.eof == Catch::Approx(1.0).margin(1e-8));
  CHECK(rep.distilled.fidelity_bell == Catch::Approx(1.0).margin(1e-8));
  const double expected_p = 2.0 * 0.49 * 0.49 / (1.0 + 0.49 * 0.49);
  CHECK(rep.success_prob == Catch::Approx(expected_p).margin(1e-10));
  CHECK(rep.fitted_tv.has_value());
  CHECK(*rep.fitted_tv == Catch::Approx(0.2401).margin(1e-8));
}

TEST_CASE("run_distill: overfiltering to eps' = eps/sqrt(tv)") {
  const ExperimentConfig cfg = noiseless_config(0.49, 0.0, 0.378);
  const DistillationReport rep = run_distill(cfg);
  const double eps_out = 0.49 / std::sqrt(0.378);
  CHECK(eps_out == Catch::Approx(0.797).margin(5e-4));
  CHECK(rep.distilled.epsilon_exp == Catch::Approx(eps_out).margin(1e-9));
  const double expected_eof =
      eof_from_concurrence(2.0 * eps_out / (1.0 + eps_out * eps_out));
  CHECK(rep.distilled.eof == Catch::Approx(expected_eof).margin(1e-8));
}

TEST_CASE("run_distill: first reference mixed state, noiseless model") {
  const ExperimentConfig cfg = noiseless_config(0.59, 0.54, 0.378);
  const DistillationReport rep = run_distill(cfg);
  CHECK(rep.distilled.epsilon_exp ==
        Catch::Approx(0.59 / std::sqrt(0.378)).margin(1e-9));
  CHECK(rep.distilled.epsilon_exp == Catch::Approx(0.96).margin(5e-3));
  CHECK(rep.distilled.lambda_exp == Catch::Approx(0.54).margin(1e-9));
  CHECK(rep.distilled.eof == Catch::Approx(0.63).margin(1e-2));
  CHECK(rep.success_prob > 0.0);
  CHECK(rep.success_prob <= 1.0);
}

TEST_CASE("run_distill: error bars appear when mc_trials is set") {
  ExperimentConfig cfg = noiseless_config(0.59, 0.54, 0.378);
  cfg.acquisition_scale = 2000.0;
  cfg.noise = Noise::Poisson;
  cfg.mc_trials = 25;
  cfg.mc_seed = 61;
  const DistillationReport rep = run_distill(cfg);
  REQUIRE(rep.initial_errors.count("eof") == 1);
  REQUIRE(rep.distilled_errors.count("eof") == 1);
  CHECK(rep.initial_errors.at("eof").std > 0.0);
  CHECK(rep.initial_errors.at("eof").n_trials +
            rep.initial_errors.at("eof").skipped ==
        25);
}

TEST_CASE("run_distill: deterministic given the config") {
  ExperimentConfig cfg = noiseless_config(0.6, 0.3, 0.5);
  cfg.acquisition_scale = 3000.0;
  cfg.noise = Noise::Poisson;
  cfg.seed = 77;
  const DistillationReport a = run_distill(cfg);
  const DistillationReport b = run_distill(cfg);
  CHECK(a.initial.eof == b.initial.eof);
  CHECK(a.distilled.eof == b.distilled.eof);
  cfg.seed = 78;
  const DistillationReport c = run_distill(cfg);
  CHECK(a.distilled.eof != c.distilled.eof);
}

TEST_CASE("run_sweep_tv: the seven-sample sweep peaks near eps^2") {
  const std::vector<double> seven = {0.11, 0.13, 0.16, 0.21, 0.27, 0.41, 0.69};
  const ExperimentConfig cfg = noiseless_config(0.49, 0.0, 1.0);
  const auto rows = run_sweep_tv(cfg, seven);
  REQUIRE(rows.size() == 7);

  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].eof > rows[best].eof) best = i;
  const double best_tv = rows[best].parameter;
  CHECK((best_tv == 0.21 || best_tv == 0.27));

  // pure noiseless inputs keep unit purity across the sweep
  for (const auto& row : rows)
    REQUIRE(row.purity == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("run_sweep_tv: the identity filter row equals the input metrics") {
  const ExperimentConfig cfg = noiseless_config(0.49, 0.0, 1.0);
  const auto rows = run_sweep_tv(cfg, {1.0});
  const DistillationReport base = run_distill(cfg);
  CHECK(rows[0].eof == Catch::Approx(base.initial.eof).margin(1e-9));
  CHECK(rows[0].fidelity ==
        Catch::Approx(base.initial.fidelity_bell).margin(1e-9));
  CHECK(rows[0].success_prob == 1.0);
}

TEST_CASE("run_sweep_tv: poisson rows track the noiseless rows") {
  const std::vector<double> seven = {0.11, 0.13, 0.16, 0.21, 0.27, 0.41, 0.69};
  ExperimentConfig cfg = noiseless_config(0.49, 0.0, 1.0);
  const auto clean = run_sweep_tv(cfg, seven);

  // seed-averaged EOF per row stays within 0.03 of the noiseless value
  // (maximum-likelihood reconstruction, as in the lab pipeline)
  ExperimentConfig noisy_cfg = cfg;
  noisy_cfg.acquisition_scale = 10000.0;
  noisy_cfg.noise = Noise::Poisson;
  noisy_cfg.method = TomoMethod::Mle;
  std::vector<double> sums(seven.size(), 0.0);
  const int n_seeds = 100;
  for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
    noisy_cfg.seed = seed;
    const auto noisy = run_sweep_tv(noisy_cfg, seven);
    for (std::size_t i = 0; i < seven.size(); ++i) {
      sums[i] += noisy[i].eof;
      REQUIRE(std::abs(noisy[i].eof - clean[i].eof) <= 0.1);
    }
  }
  for (std::size_t i = 0; i < seven.size(); ++i)
    REQUIRE(std::abs(sums[i] / n_seeds - clean[i].eof) <= 0.03);
}

TEST_CASE("run_sweep_epsilon: optimum at eps = sqrt(tv), overfiltering past it") {
  const double tv = 0.378;
  ExperimentConfig cfg = noiseless_config(0.5, 0.0, tv);
  const double eps_opt = std::sqrt(tv);
  const auto rows =
      run_sweep_epsilon(cfg, {0.3, eps_opt, 1.0}, StateFamily::Phi);
  CHECK(rows[1].eof == Catch::Approx(1.0).margin(1e-8));
  CHECK(rows[2].eof < 1.0);  // eps = 1 overfilters
  CHECK(rows[0].eof < rows[1].eof);
}

TEST_CASE("run_sweep_epsilon: both families coincide pointwise") {
  ExperimentConfig cfg = noiseless_config(0.5, 0.0, 0.41);
  const std::vector<double> eps = {0.3, 0.49, 0.64, 0.8, 1.0};
  const auto phi = run_sweep_epsilon(cfg, eps, StateFamily::Phi);
  const auto psi = run_sweep_epsilon(cfg, eps, StateFamily::Psi);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    REQUIRE(phi[i].eof == Catch::Approx(psi[i].eof).margin(1e-9));
    REQUIRE(phi[i].fidelity == Catch::Approx(psi[i].fidelity).margin(1e-9));
  }
}

TEST_CASE("run_qpt_characterization: noiseless round trips") {
  ExperimentConfig cfg;
  cfg.acquisition_scale = 1e10;
  cfg.noise = Noise::None;

  const QptCharacterization c11 = run_qpt_characterization(cfg, 0.11);
  CHECK(c11.process_fid == Catch::Approx(1.0).margin(1e-7));
  CHECK(c11.fitted_tv == Catch::Approx(0.11).margin(1e-3));

  const QptCharacterization c1 = run_qpt_characterization(cfg, 1.0);
  CHECK(frobenius_distance(c1.chi.raw.matrix(),
                           ComplexMatrix::diagonal({1.0, 0.0, 0.0, 0.0})) <=
        1e-9);
}

TEST_CASE("run_qpt_characterization: noisy fits scatter within 0.03") {
  ExperimentConfig cfg;
  cfg.acquisition_scale = 5000.0;
  cfg.noise = Noise::Poisson;
  const double tv_true = 0.69;
  double sum = 0.0, sum2 = 0.0;
  const int n = 100;
  for (std::uint64_t seed = 0; seed < n; ++seed) {
    cfg.seed = seed;
    const QptCharacterization c = run_qpt_characterization(cfg, tv_true);
    sum += c.fitted_tv;
    sum2 += c.fitted_tv * c.fitted_tv;
  }
  const double mean = sum / n;
  const double std_dev = std::sqrt(std::max(0.0, sum2 / n - mean * mean));
  REQUIRE(std::abs(mean - tv_true) <= 0.01);
  REQUIRE(std_dev <= 0.03);
}

TEST_CASE("run_table1: six rows with the fitted transmissions") {
  const auto rows = run_table1(ExperimentConfig{});
  REQUIRE(rows.size() == 6);

  // row 1: tv fitted from (0.59/0.96)^2, lambda preserved, eof near 0.63
  CHECK(rows[0].fitted_tv == Catch::Approx(0.378).margin(5e-4));
  CHECK(rows[0].report.distilled.epsilon_exp ==
        Catch::Approx(0.96).margin(1e-9));
  CHECK(rows[0].report.distilled.lambda_exp ==
        Catch::Approx(0.54).margin(1e-9));
  CHECK(rows[0].report.distilled.eof == Catch::Approx(0.63).margin(5e-3));
  CHECK(rows[0].dev_eof == Catch::Approx(rows[0].report.distilled.eof - 0.60)
                               .margin(1e-9));

  // row 4 pairs a Psi state with a near-matching model
  CHECK(rows[3].family == StateFamily::Psi);
  CHECK(rows[3].report.distilled.eof == Catch::Approx(0.66).margin(5e-3));

  for (const auto& row : rows) {
    CHECK(row.report.success_prob > 0.0);
    CHECK(row.report.success_prob <= 1.0);
    CHECK(row.report.distilled.epsilon_exp ==
          Catch::Approx(row.reference.eps_dist).margin(1e-9));
    // the model preserves lambda through the filter
    CHECK(row.report.distilled.lambda_exp ==
          Catch::Approx(row.reference.lam_init).margin(1e-9));
  }
}

TEST_CASE("run_table1: heralded average entanglement does not grow") {
  // success_prob * eof(distilled) <= eof(initial) + slack on every row
  for (const auto& row : run_table1(ExperimentConfig{})) {
    REQUIRE(row.report.success_prob * row.report.distilled.eof <=
            row.report.initial.eof + 0.02);
  }
}

TEST_CASE("synthetic lambda = 0 row: unit fidelity at the optimum") {
  const ExperimentConfig cfg = noiseless_config(0.59, 0.0, 0.59 * 0.59);
  const DistillationReport rep = run_distill(cfg);
  CHECK(rep.distilled.fidelity_bell == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("prepare_state: depolarizing admixture stays a valid state") {
  ExperimentConfig cfg = noiseless_config(0.49, 0.0, 0.5);
  cfg.depol_weight = 0.03;
  const DensityMatrix rho = prepare_state(cfg);
  CHECK(rho.matrix().trace().real() == Catch::Approx(1.0).margin(1e-12));
  CHECK(purity(rho) < 1.0);
  const auto es = herm_eig(rho.matrix());
  CHECK(es.values.back() >= 0.0074);  // w/4 floor on every eigenvalue
}
