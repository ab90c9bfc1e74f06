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
#include "stripesim/signals.hpp"

namespace stripesim {

/// Orthonormal pilot set Phi, the projector P = I - Phi Phi^H onto its
/// orthogonal complement, and the economy factor Psi with P = Psi Psi^H,
/// Psi^H Psi = I. Both factors are columns of the unitary DFT matrix, so the
/// orthogonality relations hold by construction, not up to an SVD tolerance.
struct PilotBasis {
  Eigen::MatrixXcd phi;        // tau_p x K
  Eigen::MatrixXcd projector;  // tau_p x tau_p
  Eigen::MatrixXcd psi;        // tau_p x (tau_p - K)

  int pilot_len() const { return static_cast<int>(phi.rows()); }
  int num_ues() const { return static_cast<int>(phi.cols()); }
  int residual_dim() const { return static_cast<int>(psi.cols()); }
};

inline PilotBasis build_pilots(int pilot_len, int num_ues) {
  if (num_ues < 1) throw std::invalid_argument("build_pilots: need at least one UE");
  if (pilot_len <= num_ues)
    throw std::invalid_argument("build_pilots: pilot_len must exceed num_ues");

  Eigen::MatrixXcd dft(pilot_len, pilot_len);
  const double scale = 1.0 / std::sqrt(static_cast<double>(pilot_len));
  for (int a = 0; a < pilot_len; ++a) {
    for (int b = 0; b < pilot_len; ++b) {
      const double angle = -2.0 * M_PI * static_cast<double>(a) * static_cast<double>(b) /
                           static_cast<double>(pilot_len);
      dft(a, b) = scale * std::complex<double>(std::cos(angle), std::sin(angle));
    }
  }

  PilotBasis basis;
  basis.phi = dft.leftCols(num_ues);
  basis.psi = dft.rightCols(pilot_len - num_ues);
  basis.projector = Eigen::MatrixXcd::Identity(pilot_len, pilot_len) -
                    basis.phi * basis.phi.adjoint();
  return basis;
}

/// Per-AP LS channel estimates, N x K each.
struct ChannelEstimates {
  std::vector<Eigen::MatrixXcd> h_hat;
};

/// Pilot-phase residuals: the received block minus the reconstructed
/// served-user component, and its despread form z_psi = z * Psi.
struct Residuals {
  std::vector<Eigen::MatrixXcd> z;      // L of N x tau_p
  std::vector<Eigen::MatrixXcd> z_psi;  // L of N x (tau_p - K)
};

/// LS channel estimate per AP: H_hat = Y * Phi / sqrt(p * tau_p).
inline ChannelEstimates ls_estimate(const PilotRx& rx, const PilotBasis& pilots,
                                    const SystemConfig& cfg) {
  const double scale = 1.0 / std::sqrt(cfg.ue_power * pilots.pilot_len());
  ChannelEstimates est;
  est.h_hat.reserve(rx.y.size());
  for (const auto& y : rx.y) {
    if (y.cols() != pilots.pilot_len())
      throw std::invalid_argument("ls_estimate: pilot block width mismatch");
    est.h_hat.push_back(scale * y * pilots.phi);
  }
  return est;
}

/// Residual after stripping the reconstructed pilots: z = Y - sqrt(p*tau_p) *
/// H_hat * Phi^H. Algebraically z = (g s^H + noise) * P, so z * Phi vanishes.
inline Residuals compute_residuals(const PilotRx& rx, const ChannelEstimates& est,
                                   const PilotBasis& pilots, const SystemConfig& cfg) {
  if (rx.y.size() != est.h_hat.size())
    throw std::invalid_argument("compute_residuals: estimate/reception AP count mismatch");
  const double scale = std::sqrt(cfg.ue_power * pilots.pilot_len());
  Residuals res;
  res.z.reserve(rx.y.size());
  res.z_psi.reserve(rx.y.size());
  for (std::size_t l = 0; l < rx.y.size(); ++l) {
    Eigen::MatrixXcd z = rx.y[l] - scale * est.h_hat[l] * pilots.phi.adjoint();
    res.z_psi.push_back(z * pilots.psi);
    res.z.push_back(std::move(z));
  }
  return res;
}

/// Component of the interferer signal identifiable from residuals: Psi^H s.
inline Eigen::VectorXcd project_oos_signal(const Eigen::VectorXcd& s, const PilotBasis& pilots) {
  if (s.size() != pilots.pilot_len())
    throw std::invalid_argument("project_oos_signal: signal length mismatch");
  return pilots.psi.adjoint() * s;
}

}  // namespace stripesim
