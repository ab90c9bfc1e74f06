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
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stripesim/channel.hpp"
#include "stripesim/errors.hpp"
#include "stripesim/fronthaul.hpp"
#include "stripesim/oos_estimation.hpp"
#include "stripesim/projection.hpp"

namespace stripesim {

// --------------------------------------------------------------------------
// QPSK. Gray mapping, unit energy per symbol:
//   00 -> (+1+j)/sqrt(2)   01 -> (-1+j)/sqrt(2)
//   11 -> (-1-j)/sqrt(2)   10 -> (+1-j)/sqrt(2)
// First bit selects the imaginary sign, second bit the real sign.
// --------------------------------------------------------------------------

inline Eigen::VectorXcd qpsk_modulate(const std::vector<std::uint8_t>& bits) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_modulate: odd bit count");
  const double a = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd symbols(static_cast<Eigen::Index>(bits.size() / 2));
  for (Eigen::Index k = 0; k < symbols.size(); ++k) {
    const double im = bits[2 * k] ? -a : a;
    const double re = bits[2 * k + 1] ? -a : a;
    symbols(k) = {re, im};
  }
  return symbols;
}

/// Nearest constellation point per symbol (sign decisions; ties go to 0).
inline std::vector<std::uint8_t> qpsk_demodulate(const Eigen::VectorXcd& estimates) {
  std::vector<std::uint8_t> bits(2 * estimates.size());
  for (Eigen::Index k = 0; k < estimates.size(); ++k) {
    bits[2 * k] = estimates(k).imag() < 0.0 ? 1 : 0;
    bits[2 * k + 1] = estimates(k).real() < 0.0 ? 1 : 0;
  }
  return bits;
}

// --------------------------------------------------------------------------
// Augmented channels. The interferer is detected as one extra fictitious
// user: column K+1 of each AP's effective channel matrix. The served-user
// columns carry the transmit amplitude sqrt(p) so the detector works on
// unit-energy symbols.
// --------------------------------------------------------------------------

/// [sqrt(p) * H_hat_l, g_hat_l] per AP.
inline std::vector<Eigen::MatrixXcd> build_augmented(const ChannelEstimates& est,
                                                     const OosEstimate& oos,
                                                     const SystemConfig& cfg) {
  if (est.h_hat.size() != oos.g_hat.size())
    throw std::invalid_argument("build_augmented: AP count mismatch");
  const double amp = std::sqrt(cfg.ue_power);
  std::vector<Eigen::MatrixXcd> aug;
  aug.reserve(est.h_hat.size());
  for (std::size_t l = 0; l < est.h_hat.size(); ++l) {
    Eigen::MatrixXcd a(est.h_hat[l].rows(), est.h_hat[l].cols() + 1);
    a.leftCols(est.h_hat[l].cols()) = amp * est.h_hat[l];
    a.col(est.h_hat[l].cols()) = oos.g_hat[l];
    aug.push_back(std::move(a));
  }
  return aug;
}

/// sqrt(p) * H_hat_l per AP, no fictitious user.
inline std::vector<Eigen::MatrixXcd> build_unaugmented(const ChannelEstimates& est,
                                                       const SystemConfig& cfg) {
  const double amp = std::sqrt(cfg.ue_power);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(est.h_hat.size());
  for (const auto& h : est.h_hat) out.push_back(amp * h);
  return out;
}

struct Detection {
  Eigen::VectorXcd x_hat;            // served-user symbol estimates, length K
  std::complex<double> s_hat{0, 0};  // fictitious-user estimate; discarded downstream
};

namespace detail {

/// Rank-revealing LS solve of the stacked system; relative rank tolerance
/// 1e-12. Throws if the stacked matrix loses column rank.
inline Eigen::VectorXcd solve_stacked(const std::vector<Eigen::VectorXcd>& y,
                                      const std::vector<Eigen::MatrixXcd>& mats) {
  if (y.size() != mats.size() || y.empty())
    throw std::invalid_argument("solve_stacked: inconsistent AP counts");
  const auto rows = mats.front().rows();
  const auto cols = mats.front().cols();
  const auto num_aps = static_cast<Eigen::Index>(mats.size());
  Eigen::MatrixXcd a(rows * num_aps, cols);
  Eigen::VectorXcd b(rows * num_aps);
  for (Eigen::Index l = 0; l < num_aps; ++l) {
    a.middleRows(l * rows, rows) = mats[l];
    b.segment(l * rows, rows) = y[l];
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
  cod.setThreshold(1e-12);
  cod.compute(a);
  if (cod.rank() < cols)
    throw RankDeficientError("stacked channel matrix is rank deficient (rank " +
                             std::to_string(cod.rank()) + " of " + std::to_string(cols) + ")");
  return cod.solve(b);
}

}  // namespace detail

/// Joint zero-forcing detection of served users plus the fictitious user at
/// the CPU. Charges the payload forwarding chain: link l relays the received
/// vectors and channel columns of APs 1..l.
inline Detection detect_centralized(const std::vector<Eigen::VectorXcd>& y,
                                    const std::vector<Eigen::MatrixXcd>& aug,
                                    FronthaulLedger* ledger = nullptr) {
  if (ledger) {
    const int num_aps = static_cast<int>(aug.size());
    for (int l = 1; l <= num_aps; ++l)
      for (int i = 1; i <= l; ++i)
        charge(*ledger, l,
               {static_cast<std::uint16_t>(l), PayloadForward{y[i - 1], aug[i - 1]}});
  }
  const Eigen::VectorXcd sol = detail::solve_stacked(y, aug);
  Detection det;
  det.x_hat = sol.head(sol.size() - 1);
  det.s_hat = sol(sol.size() - 1);
  return det;
}

// --------------------------------------------------------------------------
// Sequential LS along the stripe.
// --------------------------------------------------------------------------

/// Running estimate and prior-covariance-like matrix of the sequential LS.
/// q stays Hermitian positive semidefinite; it starts at alpha * I with alpha
/// large so the zero initial estimate carries negligible weight.
struct RlsState {
  Eigen::VectorXcd est;
  Eigen::MatrixXcd q;
};

inline RlsState rls_init(int dim, double alpha) {
  if (dim < 1) throw std::invalid_argument("rls_init: dimension must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("rls_init: alpha must be > 0");
  return {Eigen::VectorXcd::Zero(dim), alpha * Eigen::MatrixXcd::Identity(dim, dim)};
}

/// One AP's update:
///   gain  T = Q A^H (sigma^2 I + A Q A^H)^{-1}
///   est  <- est + T (y - A est)
///   Q    <- (I - T A) Q, re-symmetrized against floating-point drift.
/// The covariance recursion runs in Joseph form, which is algebraically the
/// same for this gain but stays accurate when the diffuse prior makes
/// (I - T A) Q cancel across ~alpha scales.
inline RlsState rls_step(const RlsState& state, const Eigen::VectorXcd& y_l,
                         const Eigen::MatrixXcd& aug_l, double noise_var) {
  const auto dim = state.est.size();
  if (aug_l.cols() != dim || aug_l.rows() != y_l.size())
    throw std::invalid_argument("rls_step: dimension mismatch");

  const Eigen::MatrixXcd qa = state.q * aug_l.adjoint();  // (dim x N)
  Eigen::MatrixXcd innovation = aug_l * qa;               // (N x N)
  innovation.diagonal().array() += noise_var;
  innovation = 0.5 * (innovation + innovation.adjoint().eval());

  // Every true eigenvalue of the innovation is >= noise_var, so with noise the
  // matrix is provably invertible; singularity can only arise at zero noise
  // once the prior has collapsed onto a low-rank subspace.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(innovation);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("rls_step: innovation eigendecomposition failed");
  const double lam_max = eig.eigenvalues().maxCoeff();
  if (noise_var == 0.0) {
    const double lam_min = eig.eigenvalues().minCoeff();
    if (!(lam_max > 0.0) || lam_min <= 1e-13 * lam_max)
      throw SingularInnovationError("rls_step: singular innovation matrix");
  }
  // Clamp roundoff below the sigma^2 floor before inverting.
  const Eigen::VectorXd lams = eig.eigenvalues().cwiseMax(noise_var);
  const Eigen::MatrixXcd inv = eig.eigenvectors() * lams.cwiseInverse().asDiagonal() *
                               eig.eigenvectors().adjoint();
  const Eigen::MatrixXcd gain = qa * inv;  // (dim x N)

  RlsState next;
  next.est = state.est + gain * (y_l - aug_l * state.est);
  const Eigen::MatrixXcd shrink =
      Eigen::MatrixXcd::Identity(dim, dim) - gain * aug_l;
  next.q = shrink * state.q * shrink.adjoint() + noise_var * (gain * gain.adjoint());
  next.q = 0.5 * (next.q + next.q.adjoint().eval());
  return next;
}

/// Chains the RLS over the stripe and charges one state packet per link.
inline Detection detect_sequential(const std::vector<Eigen::VectorXcd>& y,
                                   const std::vector<Eigen::MatrixXcd>& aug,
                                   const SystemConfig& cfg, FronthaulLedger* ledger = nullptr) {
  if (y.size() != aug.size() || y.empty())
    throw std::invalid_argument("detect_sequential: inconsistent AP counts");
  const int dim = static_cast<int>(aug.front().cols());
  RlsState state = rls_init(dim, cfg.rls_prior);
  for (std::size_t l = 0; l < aug.size(); ++l) {
    state = rls_step(state, y[l], aug[l], cfg.noise_var);
    if (ledger)
      charge(*ledger, static_cast<int>(l) + 1,
             {static_cast<std::uint16_t>(l + 1), RlsStatePacket{state.est, state.q}});
  }
  Detection det;
  if (dim == cfg.num_ues + 1) {
    det.x_hat = state.est.head(dim - 1);
    det.s_hat = state.est(dim - 1);
  } else {
    det.x_hat = state.est;
  }
  return det;
}

enum class DetectorMode { Centralized, Sequential };

/// Baseline that ignores the interferer: the same detectors run on the
/// K-column channel matrix alone.
inline Eigen::VectorXcd detect_no_suppression(const std::vector<Eigen::VectorXcd>& y,
                                              const ChannelEstimates& est,
                                              const SystemConfig& cfg, DetectorMode mode,
                                              FronthaulLedger* ledger = nullptr) {
  const auto mats = build_unaugmented(est, cfg);
  if (mode == DetectorMode::Centralized) {
    if (ledger) {
      const int num_aps = static_cast<int>(mats.size());
      for (int l = 1; l <= num_aps; ++l)
        for (int i = 1; i <= l; ++i)
          charge(*ledger, l,
                 {static_cast<std::uint16_t>(l), PayloadForward{y[i - 1], mats[i - 1]}});
    }
    return detail::solve_stacked(y, mats);
  }
  RlsState state = rls_init(static_cast<int>(mats.front().cols()), cfg.rls_prior);
  for (std::size_t l = 0; l < mats.size(); ++l) {
    state = rls_step(state, y[l], mats[l], cfg.noise_var);
    if (ledger)
      charge(*ledger, static_cast<int>(l) + 1,
             {static_cast<std::uint16_t>(l + 1), RlsStatePacket{state.est, state.q}});
  }
  return state.est;
}

/// Genie bound: centralized zero-forcing with the true channels of both the
/// served users and the interferer. No realizable fronthaul protocol.
inline Eigen::VectorXcd detect_genie(const std::vector<Eigen::VectorXcd>& y,
                                     const ChannelRealization& chan, const SystemConfig& cfg) {
  const double amp = std::sqrt(cfg.ue_power);
  std::vector<Eigen::MatrixXcd> aug;
  aug.reserve(chan.h.size());
  for (std::size_t l = 0; l < chan.h.size(); ++l) {
    Eigen::MatrixXcd a(chan.h[l].rows(), chan.h[l].cols() + 1);
    a.leftCols(chan.h[l].cols()) = amp * chan.h[l];
    a.col(chan.h[l].cols()) = chan.g[l];
    aug.push_back(std::move(a));
  }
  const Eigen::VectorXcd sol = detail::solve_stacked(y, aug);
  return sol.head(sol.size() - 1);
}

}  // namespace stripesim
