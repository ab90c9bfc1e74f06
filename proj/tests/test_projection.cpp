/*
 * Copyright 2026 The stripesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "stripesim/channel.hpp"
#include "stripesim/projection.hpp"

using namespace stripesim;

namespace {

SystemConfig chain_config(int num_aps, int antennas, int num_ues, int pilot_len) {
  SystemConfig cfg;
  cfg.num_aps = num_aps;
  cfg.antennas_per_ap = antennas;
  cfg.num_ues = num_ues;
  cfg.pilot_len = pilot_len;
  cfg.coherence_len = pilot_len + 4;
  cfg.ue_power = 1.5;
  cfg.oos_power = 0.7;
  cfg.noise_var = 0.3;
  return cfg;
}

LargeScale unit_gains(const SystemConfig& cfg) {
  LargeScale ls;
  ls.beta = Eigen::MatrixXd::Ones(cfg.num_aps, cfg.num_ues + 1);
  return ls;
}

}  // namespace

TEST_CASE("pilot basis invariants hold across dimensions") {
  for (auto [tau_p, k] : {std::pair{2, 1}, {5, 2}, {16, 5}, {50, 5}, {31, 30}}) {
    const PilotBasis basis = build_pilots(tau_p, k);
    const auto eye_k = Eigen::MatrixXcd::Identity(k, k);
    const auto eye_m = Eigen::MatrixXcd::Identity(tau_p - k, tau_p - k);

    CHECK((basis.phi.adjoint() * basis.phi - eye_k).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((basis.psi.adjoint() * basis.psi - eye_m).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((basis.phi.adjoint() * basis.psi).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((basis.psi * basis.psi.adjoint() - basis.projector).cwiseAbs().maxCoeff() < 1e-12);

    // Projector: Hermitian, idempotent, trace = rank = tau_p - K.
    CHECK((basis.projector - basis.projector.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((basis.projector * basis.projector - basis.projector).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(basis.projector.trace().real() - (tau_p - k)) < 1e-10);
    CHECK(std::abs(basis.projector.trace().imag()) < 1e-10);
    CHECK(basis.psi.cols() == tau_p - k);
  }
}

TEST_CASE("degenerate pilot dimensions are rejected") {
  CHECK_THROWS_AS(build_pilots(5, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_pilots(4, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_pilots(3, 0), std::invalid_argument);
}

TEST_CASE("single-pilot complement spans the rest of the space") {
  const PilotBasis basis = build_pilots(2, 1);
  // One pilot column, one complement column; projector has rank 1.
  CHECK(basis.phi.cols() == 1);
  CHECK(basis.psi.cols() == 1);
  CHECK(std::abs(basis.projector.trace().real() - 1.0) < 1e-12);
  CHECK(std::abs(basis.phi.col(0).dot(basis.psi.col(0))) < 1e-12);
}

TEST_CASE("LS estimation is exact without noise and interference") {
  const SystemConfig cfg = chain_config(2, 3, 2, 7);
  SystemConfig quiet = cfg;
  quiet.noise_var = 0.0;
  const PilotBasis pilots = build_pilots(cfg.pilot_len, cfg.num_ues);
  Rng rng(21);
  const ChannelRealization chan = draw_channels(unit_gains(cfg), quiet, rng);
  const Eigen::VectorXcd zero_oos = Eigen::VectorXcd::Zero(cfg.pilot_len);
  const PilotRx rx = synthesize_pilot_rx(chan, pilots, zero_oos, quiet, rng);
  const ChannelEstimates est = ls_estimate(rx, pilots, quiet);
  for (int l = 0; l < cfg.num_aps; ++l) CHECK((est.h_hat[l] - chan.h[l]).norm() < 1e-12);
}

TEST_CASE("interference orthogonal to the pilots leaves LS estimation exact") {
  const SystemConfig cfg = chain_config(2, 3, 2, 7);
  SystemConfig quiet = cfg;
  quiet.noise_var = 0.0;
  const PilotBasis pilots = build_pilots(cfg.pilot_len, cfg.num_ues);
  Rng rng(22);
  const ChannelRealization chan = draw_channels(unit_gains(cfg), quiet, rng);

  // Any combination of complement columns has Phi^H s = 0.
  const Eigen::VectorXcd s = pilots.psi * Eigen::VectorXcd::Random(pilots.residual_dim());
  REQUIRE((pilots.phi.adjoint() * s).norm() < 1e-12);

  const PilotRx rx = synthesize_pilot_rx(chan, pilots, s, quiet, rng);
  const ChannelEstimates est = ls_estimate(rx, pilots, quiet);
  for (int l = 0; l < cfg.num_aps; ++l) CHECK((est.h_hat[l] - chan.h[l]).norm() < 1e-11);
}

TEST_CASE("LS estimate equals its defining product and error term") {
  const SystemConfig cfg = chain_config(3, 2, 3, 9);
  const PilotBasis pilots = build_pilots(cfg.pilot_len, cfg.num_ues);
  Rng rng(23);
  const ChannelRealization chan = draw_channels(unit_gains(cfg), cfg, rng);
  const Eigen::VectorXcd oos = draw_oos_signal(cfg, rng, cfg.pilot_len);
  Rng rng_noise = rng;
  const PilotRx rx = synthesize_pilot_rx(chan, pilots, oos, cfg, rng);
  const ChannelEstimates est = ls_estimate(rx, pilots, cfg);

  const double amp = std::sqrt(cfg.ue_power * cfg.pilot_len);
  for (int l = 0; l < cfg.num_aps; ++l) {
    // Direct product oracle.
    CHECK((est.h_hat[l] - rx.y[l] * pilots.phi / amp).norm() < 1e-12);
    // Structural identity: estimate = truth + (g s^H + noise) Phi / amp.
    const Eigen::MatrixXcd noise =
        rng_noise.cgaussian_matrix(cfg.antennas_per_ap, cfg.pilot_len, cfg.noise_var);
    const Eigen::MatrixXcd err =
        (chan.g[l] * oos.adjoint() + noise) * pilots.phi / amp;
    CHECK((est.h_hat[l] - chan.h[l] - err).norm() < 1e-12);
  }
}

TEST_CASE("residuals vanish in the fully clean case and drop the pilot component always") {
  const SystemConfig cfg = chain_config(2, 3, 2, 8);
  SystemConfig quiet = cfg;
  quiet.noise_var = 0.0;
  const PilotBasis pilots = build_pilots(cfg.pilot_len, cfg.num_ues);
  Rng rng(24);
  const ChannelRealization chan = draw_channels(unit_gains(cfg), quiet, rng);
  const Eigen::VectorXcd zero_oos = Eigen::VectorXcd::Zero(cfg.pilot_len);
  const PilotRx rx = synthesize_pilot_rx(chan, pilots, zero_oos, quiet, rng);
  const Residuals res = compute_residuals(rx, ls_estimate(rx, pilots, quiet), pilots, quiet);
  for (int l = 0; l < cfg.num_aps; ++l) CHECK(res.z[l].norm() < 1e-10);

  // Noisy case: pilot-space component still vanishes.
  Rng rng2(25);
  const ChannelRealization chan2 = draw_channels(unit_gains(cfg), cfg, rng2);
  const Eigen::VectorXcd oos = draw_oos_signal(cfg, rng2, cfg.pilot_len);
  const PilotRx rx2 = synthesize_pilot_rx(chan2, pilots, oos, cfg, rng2);
  const Residuals res2 = compute_residuals(rx2, ls_estimate(rx2, pilots, cfg), pilots, cfg);
  for (int l = 0; l < cfg.num_aps; ++l) {
    CHECK((res2.z[l] * pilots.phi).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((res2.z_psi[l] - res2.z[l] * pilots.psi).norm() < 1e-12);
  }
}

TEST_CASE("noiseless despread residual is exactly rank one") {
  const SystemConfig cfg = chain_config(2, 4, 2, 10);
  SystemConfig quiet = cfg;
  quiet.noise_var = 0.0;
  const PilotBasis pilots = build_pilots(cfg.pilot_len, cfg.num_ues);
  Rng rng(26);
  const ChannelRealization chan = draw_channels(unit_gains(cfg), quiet, rng);
  const Eigen::VectorXcd oos = draw_oos_signal(quiet, rng, cfg.pilot_len);
  const PilotRx rx = synthesize_pilot_rx(chan, pilots, oos, quiet, rng);
  const Residuals res = compute_residuals(rx, ls_estimate(rx, pilots, quiet), pilots, quiet);

  const Eigen::VectorXcd s_bar = project_oos_signal(oos, pilots);
  for (int l = 0; l < cfg.num_aps; ++l) {
    CHECK((res.z_psi[l] - chan.g[l] * s_bar.adjoint()).norm() < 1e-10);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(res.z_psi[l]);
    CHECK(svd.singularValues()(1) < 1e-10);
  }
}

TEST_CASE("despreading loses nothing on the residual subspace") {
  const SystemConfig cfg = chain_config(2, 3, 2, 9);
  const PilotBasis pilots = build_pilots(cfg.pilot_len, cfg.num_ues);
  Rng rng(27);
  const ChannelRealization chan = draw_channels(unit_gains(cfg), cfg, rng);
  const Eigen::VectorXcd oos = draw_oos_signal(cfg, rng, cfg.pilot_len);
  const PilotRx rx = synthesize_pilot_rx(chan, pilots, oos, cfg, rng);
  const Residuals res = compute_residuals(rx, ls_estimate(rx, pilots, cfg), pilots, cfg);
  for (int l = 0; l < cfg.num_aps; ++l)
    CHECK((res.z_psi[l] * pilots.psi.adjoint() - res.z[l]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("signal projection: kernel, isometry, Pythagoras") {
  const PilotBasis pilots = build_pilots(12, 4);
  Rng rng(28);

  // Pilot-space signals project to zero.
  const Eigen::VectorXcd in_phi = pilots.phi * Eigen::VectorXcd::Random(4);
  CHECK(project_oos_signal(in_phi, pilots).norm() < 1e-12);

  // Complement-space signals keep their norm.
  const Eigen::VectorXcd in_psi = pilots.psi * Eigen::VectorXcd::Random(8);
  CHECK(project_oos_signal(in_psi, pilots).norm() == Catch::Approx(in_psi.norm()).epsilon(1e-12));

  // Generic split: ||s||^2 = ||Phi^H s||^2 + ||Psi^H s||^2.
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXcd s(12);
    for (int j = 0; j < 12; ++j) s(j) = rng.cgaussian(1.0);
    const double total = s.squaredNorm();
    const double split = (pilots.phi.adjoint() * s).squaredNorm() +
                         project_oos_signal(s, pilots).squaredNorm();
    CHECK(split == Catch::Approx(total).epsilon(1e-12));
    CHECK(project_oos_signal(s, pilots).norm() <= s.norm() + 1e-12);
  }
}
