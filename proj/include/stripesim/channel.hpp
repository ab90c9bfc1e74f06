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
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "stripesim/config.hpp"
#include "stripesim/projection.hpp"
#include "stripesim/rng.hpp"
#include "stripesim/signals.hpp"
#include "stripesim/topology.hpp"

namespace stripesim {

/// Per-trial small-scale channels. h[l] is N x K (column k = UE k to AP l);
/// g[l] is the interferer channel to AP l. Block fading: constant over one
/// coherence block.
struct ChannelRealization {
  std::vector<Eigen::MatrixXcd> h;
  std::vector<Eigen::VectorXcd> g;
};

/// i.i.d. Rayleigh entries: CN(0, beta) per entry for the link's path gain.
/// Draw order is fixed (per AP: UE columns, then the interferer) so a seed
/// pins the realization.
inline ChannelRealization draw_channels(const LargeScale& ls, const SystemConfig& cfg, Rng& rng) {
  const int num_aps = static_cast<int>(ls.beta.rows());
  const int num_ues = static_cast<int>(ls.beta.cols()) - 1;
  if (num_aps != cfg.num_aps || num_ues != cfg.num_ues)
    throw std::invalid_argument("draw_channels: large-scale dimensions disagree with config");

  ChannelRealization chan;
  chan.h.reserve(num_aps);
  chan.g.reserve(num_aps);
  for (int l = 0; l < num_aps; ++l) {
    Eigen::MatrixXcd h(cfg.antennas_per_ap, num_ues);
    for (int k = 0; k < num_ues; ++k)
      for (int n = 0; n < cfg.antennas_per_ap; ++n) h(n, k) = rng.cgaussian(ls.beta(l, k));
    chan.h.push_back(std::move(h));
    Eigen::VectorXcd g(cfg.antennas_per_ap);
    for (int n = 0; n < cfg.antennas_per_ap; ++n) g(n) = rng.cgaussian(ls.beta(l, num_ues));
    chan.g.push_back(std::move(g));
  }
  return chan;
}

/// Interferer transmit samples, i.i.d. CN(0, oos_power).
inline Eigen::VectorXcd draw_oos_signal(const SystemConfig& cfg, Rng& rng, int length) {
  if (length < 1) throw std::invalid_argument("draw_oos_signal: length must be >= 1");
  return rng.cgaussian_vector(length, cfg.oos_power);
}

/// Pilot-phase reception at every AP:
///   Y_l = sqrt(p * tau_p) * H_l * Phi^H + g_l * s^H + noise.
inline PilotRx synthesize_pilot_rx(const ChannelRealization& chan, const PilotBasis& pilots,
                                   const Eigen::VectorXcd& oos_signal, const SystemConfig& cfg,
                                   Rng& rng) {
  if (oos_signal.size() != pilots.pilot_len())
    throw std::invalid_argument("synthesize_pilot_rx: interferer signal length mismatch");
  const double amp = std::sqrt(cfg.ue_power * pilots.pilot_len());
  PilotRx rx;
  rx.oos_signal = oos_signal;
  rx.y.reserve(chan.h.size());
  for (std::size_t l = 0; l < chan.h.size(); ++l) {
    if (chan.h[l].cols() != pilots.num_ues())
      throw std::invalid_argument("synthesize_pilot_rx: channel/pilot UE count mismatch");
    Eigen::MatrixXcd y = amp * chan.h[l] * pilots.phi.adjoint() +
                         chan.g[l] * oos_signal.adjoint();
    y += rng.cgaussian_matrix(y.rows(), y.cols(), cfg.noise_var);
    rx.y.push_back(std::move(y));
  }
  return rx;
}

/// One payload symbol period at every AP:
///   y_l = sqrt(p) * H_l * x + g_l * s + noise,
/// with x unit-energy QPSK. The UE amplitude is explicit here, mirroring the
/// pilot phase, so the swept uplink power governs the payload SNR as well.
/// The interferer's power rides inside s.
inline PayloadRx synthesize_payload_rx(const ChannelRealization& chan, const Eigen::VectorXcd& x,
                                       std::complex<double> s, const SystemConfig& cfg, Rng& rng) {
  PayloadRx rx;
  rx.x_true = x;
  rx.s_true = s;
  const double amp = std::sqrt(cfg.ue_power);
  rx.y.reserve(chan.h.size());
  for (std::size_t l = 0; l < chan.h.size(); ++l) {
    if (chan.h[l].cols() != x.size())
      throw std::invalid_argument("synthesize_payload_rx: payload length mismatch");
    Eigen::VectorXcd y = amp * (chan.h[l] * x) + chan.g[l] * s;
    y += rng.cgaussian_vector(y.size(), cfg.noise_var);
    rx.y.push_back(std::move(y));
  }
  return rx;
}

}  // namespace stripesim
