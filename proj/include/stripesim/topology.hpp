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
#include <stdexcept>
#include <vector>

#include "stripesim/config.hpp"
#include "stripesim/rng.hpp"

namespace stripesim {

/// AP/UE/interferer coordinates in meters. APs sit on the border of the
/// square; UEs and the interferer inside the inset square.
struct Placement {
  std::vector<Eigen::Vector2d> ap_positions;
  std::vector<Eigen::Vector2d> ue_positions;
  Eigen::Vector2d oos_position;
};

/// Linear path gains, one row per AP; the last column is the interferer.
struct LargeScale {
  Eigen::MatrixXd beta;  // L x (K+1)
};

/// Urban-microcell path loss at 2 GHz: -30.5 - 36.7*log10(d / 1 m).
inline double pathloss_db(double distance_3d_m) {
  if (!(distance_3d_m > 0.0)) throw std::domain_error("pathloss_db: distance must be positive");
  return -30.5 - 36.7 * std::log10(distance_3d_m);
}

/// Walks the square perimeter counterclockwise; t is arc length from (0,0).
inline Eigen::Vector2d perimeter_point(double t, double side) {
  const double perimeter = 4.0 * side;
  t = std::fmod(t, perimeter);
  if (t < 0.0) t += perimeter;
  if (t < side) return {t, 0.0};
  if (t < 2.0 * side) return {side, t - side};
  if (t < 3.0 * side) return {side - (t - 2.0 * side), side};
  return {0.0, side - (t - 3.0 * side)};
}

/// APs at equal arc-length spacing along the border, starting from the
/// midpoint of the bottom edge; UEs and the interferer uniform inside the
/// square inset by border_gap. Pure function of (config, rng state).
inline Placement place_entities(const SystemConfig& cfg, Rng& rng) {
  Placement p;
  const double side = cfg.area_side;
  const double spacing = 4.0 * side / cfg.num_aps;
  p.ap_positions.reserve(cfg.num_aps);
  for (int l = 0; l < cfg.num_aps; ++l)
    p.ap_positions.push_back(perimeter_point(side / 2.0 + l * spacing, side));

  const double lo = cfg.border_gap;
  const double hi = side - cfg.border_gap;
  p.ue_positions.reserve(cfg.num_ues);
  for (int k = 0; k < cfg.num_ues; ++k) {
    const double x = rng.uniform(lo, hi);
    const double y = rng.uniform(lo, hi);
    p.ue_positions.emplace_back(x, y);
  }
  const double ox = rng.uniform(lo, hi);
  const double oy = rng.uniform(lo, hi);
  p.oos_position = {ox, oy};
  return p;
}

/// Path gains over 3-D distance (horizontal separation plus the AP mast
/// height), linear scale.
inline LargeScale large_scale(const Placement& placement, const SystemConfig& cfg) {
  const int num_aps = static_cast<int>(placement.ap_positions.size());
  const int num_ues = static_cast<int>(placement.ue_positions.size());
  LargeScale ls;
  ls.beta.resize(num_aps, num_ues + 1);
  for (int l = 0; l < num_aps; ++l) {
    for (int k = 0; k <= num_ues; ++k) {
      const Eigen::Vector2d& tx =
          (k < num_ues) ? placement.ue_positions[k] : placement.oos_position;
      const double horiz = (tx - placement.ap_positions[l]).norm();
      const double dist = std::sqrt(horiz * horiz + cfg.ap_height_diff * cfg.ap_height_diff);
      ls.beta(l, k) = std::pow(10.0, pathloss_db(dist) / 10.0);
    }
  }
  return ls;
}

}  // namespace stripesim
