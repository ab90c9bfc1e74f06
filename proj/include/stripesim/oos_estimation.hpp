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
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "stripesim/errors.hpp"
#include "stripesim/fronthaul.hpp"
#include "stripesim/projection.hpp"

namespace stripesim {

/// Dominant singular triple of a matrix. u and v are unit vectors carrying a
/// canonical phase: the largest-modulus entry of v is real and nonnegative
/// (the dominant pair of a matrix is only defined up to a common phase).
struct Rank1Factors {
  Eigen::VectorXcd u;
  Eigen::VectorXcd v;
  double sigma1 = 0.0;
  // Top two singular values nearly tied; the returned direction is then
  // numerically arbitrary.
  bool degenerate_gap = false;
};

namespace detail {

/// Phase rotation that makes v's largest-modulus entry real nonnegative.
inline std::complex<double> canonical_rotation(const Eigen::VectorXcd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const std::complex<double> pivot = v(imax);
  if (pivot == std::complex<double>(0.0, 0.0)) return {1.0, 0.0};
  return std::conj(pivot) / std::abs(pivot);
}

/// Rotates (u, v) by the common canonical phase. The outer product
/// sigma1 * u * v^H is unchanged.
inline void canonicalize_phase(Eigen::VectorXcd& u, Eigen::VectorXcd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const std::complex<double> rot = canonical_rotation(v);
  v *= rot;
  v(imax) = {std::abs(v(imax).real()), 0.0};  // scrub roundoff in the pivot slot
  u *= rot;
}

}  // namespace detail

/// Best rank-1 factorization via SVD: M ~ sigma1 * u * v^H minimizes the
/// Frobenius error over all rank-1 matrices.
inline Rank1Factors rank1_approx(const Eigen::MatrixXcd& m) {
  if (m.size() == 0 || m.norm() == 0.0)
    throw ZeroResidualError("rank1_approx: zero matrix has no dominant direction");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Rank1Factors f;
  f.sigma1 = svd.singularValues()(0);
  f.u = svd.matrixU().col(0);
  f.v = svd.matrixV().col(0);
  if (svd.singularValues().size() > 1) {
    const double gap = f.sigma1 - svd.singularValues()(1);
    f.degenerate_gap = gap < 1e-12 * f.sigma1;
  }
  detail::canonicalize_phase(f.u, f.v);
  return f;
}

/// Output of any interferer-estimation scheme. s_bar_hat holds one shared
/// vector for the cooperative schemes and one entry per AP for local
/// processing. g_hat[l] estimates the interferer channel at AP l; APs with no
/// usable residual are flagged invalid and get a zero g_hat.
struct OosEstimate {
  Method method = Method::Local;
  std::vector<Eigen::VectorXcd> s_bar_hat;
  std::vector<Eigen::VectorXcd> g_hat;
  std::vector<bool> ap_valid;

  const Eigen::VectorXcd& s_bar_at(std::size_t ap) const {
    return s_bar_hat.size() == 1 ? s_bar_hat.front() : s_bar_hat.at(ap);
  }
};

/// Interferer channel recovery from a shared signal estimate:
/// g_hat = z_psi * s_hat / ||s_hat||^2. Invariant under rescaling s_hat when
/// the detector consumes the product g_hat * s_hat^H.
inline Eigen::VectorXcd recover_oos_channel(const Eigen::MatrixXcd& z_psi,
                                            const Eigen::VectorXcd& s_hat) {
  const double nrm2 = s_hat.squaredNorm();
  if (nrm2 == 0.0) throw ZeroResidualError("recover_oos_channel: zero signal estimate");
  return (z_psi * s_hat) / nrm2;
}

/// Pools every AP's despread residual at the CPU (row-stacked) and takes the
/// best rank-1 factorization. Performance baseline; the forwarding cost grows
/// along the stripe, l residual blocks on link l.
inline OosEstimate estimate_centralized(const Residuals& res, FronthaulLedger* ledger = nullptr) {
  const int num_aps = static_cast<int>(res.z_psi.size());
  if (num_aps < 1) throw std::invalid_argument("estimate_centralized: no residuals");
  const auto rows = res.z_psi.front().rows();
  const auto cols = res.z_psi.front().cols();

  Eigen::MatrixXcd stacked(rows * num_aps, cols);
  for (int l = 0; l < num_aps; ++l) stacked.middleRows(l * rows, rows) = res.z_psi[l];

  if (ledger) {
    // Accumulate-and-forward: link l relays the blocks of APs 1..l.
    for (int l = 1; l <= num_aps; ++l)
      for (int i = 1; i <= l; ++i)
        charge(*ledger, l, {static_cast<std::uint16_t>(l), ResidualBlock{res.z_psi[i - 1]}});
  }

  const Rank1Factors f = rank1_approx(stacked);  // throws on all-zero residual

  OosEstimate est;
  est.method = Method::Centralized;
  est.s_bar_hat.push_back(f.v);
  est.g_hat.reserve(num_aps);
  est.ap_valid.assign(num_aps, true);
  for (int l = 0; l < num_aps; ++l)
    est.g_hat.push_back(f.sigma1 * f.u.segment(l * rows, rows));
  return est;
}

/// Independent per-AP rank-1 estimates; zero fronthaul, no cooperation. Each
/// AP's signal estimate carries its own phase.
inline OosEstimate estimate_local(const Residuals& res) {
  const int num_aps = static_cast<int>(res.z_psi.size());
  if (num_aps < 1) throw std::invalid_argument("estimate_local: no residuals");

  OosEstimate est;
  est.method = Method::Local;
  est.s_bar_hat.resize(num_aps);
  est.g_hat.resize(num_aps);
  est.ap_valid.assign(num_aps, true);
  bool any_valid = false;
  for (int l = 0; l < num_aps; ++l) {
    if (res.z_psi[l].norm() == 0.0) {
      est.ap_valid[l] = false;
      est.s_bar_hat[l] = Eigen::VectorXcd::Zero(res.z_psi[l].cols());
      est.g_hat[l] = Eigen::VectorXcd::Zero(res.z_psi[l].rows());
      continue;
    }
    const Rank1Factors f = rank1_approx(res.z_psi[l]);
    est.s_bar_hat[l] = f.v;
    est.g_hat[l] = f.sigma1 * f.u;
    any_valid = true;
  }
  if (!any_valid) throw ZeroResidualError("estimate_local: all residuals are zero");
  return est;
}

/// Sum of per-AP despread Gramians z_psi^H z_psi, built by the sequential
/// accumulate-and-forward pass AP 1 -> ... -> AP L -> CPU. Every link carries
/// one packed Hermitian matrix.
inline Eigen::MatrixXcd accumulate_gramian(const Residuals& res, FronthaulLedger& ledger) {
  const int num_aps = static_cast<int>(res.z_psi.size());
  if (num_aps < 1) throw std::invalid_argument("accumulate_gramian: no residuals");
  const auto dim = res.z_psi.front().cols();

  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(dim, dim);
  for (int l = 1; l <= num_aps; ++l) {
    gram += res.z_psi[l - 1].adjoint() * res.z_psi[l - 1];
    gram = 0.5 * (gram + gram.adjoint().eval());  // keep exactly Hermitian
    charge(ledger, l, {static_cast<std::uint16_t>(l), GramianPartial{gram}});
  }
  return gram;
}

/// Gramian-based scheme: the CPU takes the dominant eigenvector of the
/// accumulated Gramian as the shared signal estimate and broadcasts it back;
/// each AP then recovers its interferer channel from its own residual.
inline OosEstimate estimate_gramian(const Residuals& res, FronthaulLedger& ledger) {
  const Eigen::MatrixXcd gram = accumulate_gramian(res, ledger);
  if (gram.norm() == 0.0)
    throw ZeroResidualError("estimate_gramian: zero Gramian, nothing to estimate");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("estimate_gramian: eigendecomposition failed");
  Eigen::VectorXcd s_hat = eig.eigenvectors().col(gram.cols() - 1);  // largest eigenvalue
  s_hat *= detail::canonical_rotation(s_hat);

  const int num_aps = static_cast<int>(res.z_psi.size());
  OosEstimate est;
  est.method = Method::Gramian;
  est.s_bar_hat.push_back(s_hat);
  est.ap_valid.assign(num_aps, true);
  est.g_hat.reserve(num_aps);
  for (int l = 1; l <= num_aps; ++l) {
    charge_broadcast(ledger, l, {static_cast<std::uint16_t>(l), SignalEstimate{s_hat}});
    est.g_hat.push_back(recover_oos_channel(res.z_psi[l - 1], s_hat));
  }
  return est;
}

struct PhaseAlignment {
  double angle = 0.0;
  Eigen::VectorXcd merged;
};

/// LS-optimal phase alignment of a local estimate onto the incoming one:
/// angle = -arg(s_prev^H s_local) minimizes ||s_prev - s_local e^{j a}|| over
/// all angles; the merge is the plain average of the aligned pair. Orthogonal
/// inputs (including s_prev = 0) carry no alignment information, so the angle
/// defaults to zero.
inline PhaseAlignment phase_align(const Eigen::VectorXcd& s_prev,
                                  const Eigen::VectorXcd& s_local) {
  if (s_prev.size() != s_local.size())
    throw std::invalid_argument("phase_align: length mismatch");
  const std::complex<double> inner = s_prev.dot(s_local);  // s_prev^H s_local
  PhaseAlignment out;
  out.angle = (inner == std::complex<double>(0.0, 0.0)) ? 0.0 : -std::arg(inner);
  const std::complex<double> rot = std::polar(1.0, out.angle);
  out.merged = 0.5 * (s_prev + rot * s_local);
  return out;
}

/// Phase-rotate-and-average scheme: each AP merges its local dominant right
/// singular vector into the running estimate after an LS-optimal phase
/// rotation, forwarding only the merged vector. The final estimate is
/// broadcast back for per-AP channel recovery.
inline OosEstimate estimate_phase_rotate(const Residuals& res, FronthaulLedger& ledger) {
  const int num_aps = static_cast<int>(res.z_psi.size());
  if (num_aps < 1) throw std::invalid_argument("estimate_phase_rotate: no residuals");
  const auto dim = res.z_psi.front().cols();

  OosEstimate est;
  est.method = Method::PhaseRotate;
  est.ap_valid.assign(num_aps, true);

  Eigen::VectorXcd running = Eigen::VectorXcd::Zero(dim);
  bool any_valid = false;
  for (int l = 1; l <= num_aps; ++l) {
    if (res.z_psi[l - 1].norm() == 0.0) {
      est.ap_valid[l - 1] = false;
    } else {
      const Rank1Factors f = rank1_approx(res.z_psi[l - 1]);
      running = phase_align(running, f.v).merged;
      any_valid = true;
    }
    charge(ledger, l, {static_cast<std::uint16_t>(l), SignalEstimate{running}});
  }
  if (!any_valid)
    throw ZeroResidualError("estimate_phase_rotate: all residuals are zero");

  est.s_bar_hat.push_back(running);
  est.g_hat.reserve(num_aps);
  for (int l = 1; l <= num_aps; ++l) {
    charge_broadcast(ledger, l, {static_cast<std::uint16_t>(l), SignalEstimate{running}});
    est.g_hat.push_back(est.ap_valid[l - 1]
                            ? recover_oos_channel(res.z_psi[l - 1], running)
                            : Eigen::VectorXcd::Zero(res.z_psi[l - 1].rows()).eval());
  }
  return est;
}

}  // namespace stripesim
