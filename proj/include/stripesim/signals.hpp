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
#include <complex>
#include <vector>

namespace stripesim {

/// Pilot-phase reception: one N x tau_p block per AP, plus the interferer
/// transmit signal over the pilot phase (kept for oracle checks; receivers
/// never look at it).
struct PilotRx {
  std::vector<Eigen::MatrixXcd> y;
  Eigen::VectorXcd oos_signal;
};

/// One payload symbol period: the N-vector received at each AP, the
/// transmitted QPSK vector and the interferer sample behind it.
struct PayloadRx {
  std::vector<Eigen::VectorXcd> y;
  Eigen::VectorXcd x_true;
  std::complex<double> s_true;
};

}  // namespace stripesim
