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

#include "stripesim/topology.hpp"

using namespace stripesim;

namespace {

// Arc length from the walk origin (corner (0,0), counterclockwise) to a
// border point. Oracle for the equal-spacing check.
double arc_position(const Eigen::Vector2d& p, double side) {
  const double eps = 1e-9;
  if (std::abs(p.y()) < eps) return p.x();
  if (std::abs(p.x() - side) < eps) return side + p.y();
  if (std::abs(p.y() - side) < eps) return 2 * side + (side - p.x());
  return 3 * side + (side - p.y());
}

}  // namespace

TEST_CASE("pathloss matches the urban-microcell line") {
  CHECK(pathloss_db(1.0) == Catch::Approx(-30.5).margin(1e-12));
  CHECK(pathloss_db(10.0) == Catch::Approx(-67.2).margin(1e-12));
  CHECK(pathloss_db(100.0) == Catch::Approx(-103.9).margin(1e-12));
  CHECK_THROWS_AS(pathloss_db(0.0), std::domain_error);
  CHECK_THROWS_AS(pathloss_db(-3.0), std::domain_error);
}

TEST_CASE("pathloss is strictly decreasing in distance") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double d = rng.uniform(0.1, 2000.0);
    const double d2 = d * (1.0 + rng.uniform(1e-6, 2.0));
    CHECK(pathloss_db(d2) < pathloss_db(d));
  }
}

TEST_CASE("APs are equally spaced along the border, one per side midpoint for L=4") {
  SystemConfig cfg;
  cfg.area_side = 500.0;
  Rng rng(1);
  const Placement p = place_entities(cfg, rng);

  REQUIRE(p.ap_positions.size() == 4);
  // Bottom-edge midpoint first, counterclockwise midpoints after.
  CHECK(p.ap_positions[0].isApprox(Eigen::Vector2d(250, 0), 1e-12));
  CHECK(p.ap_positions[1].isApprox(Eigen::Vector2d(500, 250), 1e-12));
  CHECK(p.ap_positions[2].isApprox(Eigen::Vector2d(250, 500), 1e-12));
  CHECK(p.ap_positions[3].isApprox(Eigen::Vector2d(0, 250), 1e-12));

  // Pairwise spacing along the perimeter is 500 m.
  for (int l = 0; l < 4; ++l) {
    const double a = arc_position(p.ap_positions[l], cfg.area_side);
    const double b = arc_position(p.ap_positions[(l + 1) % 4], cfg.area_side);
    double gap = b - a;
    if (gap < 0) gap += 4 * cfg.area_side;
    CHECK(gap == Catch::Approx(500.0).margin(1e-9));
  }
}

TEST_CASE("perimeter spacing holds for other stripe lengths") {
  for (int num_aps : {1, 2, 3, 5, 7, 12}) {
    SystemConfig cfg;
    cfg.num_aps = num_aps;
    Rng rng(2);
    const Placement p = place_entities(cfg, rng);
    REQUIRE(static_cast<int>(p.ap_positions.size()) == num_aps);
    const double expected = 4.0 * cfg.area_side / num_aps;
    for (int l = 0; l + 1 < num_aps; ++l) {
      const double a = arc_position(p.ap_positions[l], cfg.area_side);
      const double b = arc_position(p.ap_positions[l + 1], cfg.area_side);
      double gap = b - a;
      if (gap < 0) gap += 4 * cfg.area_side;
      CHECK(gap == Catch::Approx(expected).margin(1e-9));
    }
    // Every AP sits on the border.
    for (const auto& ap : p.ap_positions) {
      const bool on_border = std::abs(ap.x()) < 1e-9 || std::abs(ap.x() - cfg.area_side) < 1e-9 ||
                             std::abs(ap.y()) < 1e-9 || std::abs(ap.y() - cfg.area_side) < 1e-9;
      CHECK(on_border);
    }
  }
}

TEST_CASE("UEs and the interferer stay inside the inset square") {
  SystemConfig cfg;
  cfg.border_gap = 10.0;
  cfg.area_side = 500.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Placement p = place_entities(cfg, rng);
    for (const auto& ue : p.ue_positions) {
      CHECK(ue.x() >= 10.0);
      CHECK(ue.x() <= 490.0);
      CHECK(ue.y() >= 10.0);
      CHECK(ue.y() <= 490.0);
    }
    CHECK(p.oos_position.x() >= 10.0);
    CHECK(p.oos_position.x() <= 490.0);
  }
}

TEST_CASE("placement is a pure function of config and seed") {
  SystemConfig cfg;
  Rng a(42), b(42);
  const Placement pa = place_entities(cfg, a);
  const Placement pb = place_entities(cfg, b);
  for (int k = 0; k < cfg.num_ues; ++k) CHECK(pa.ue_positions[k] == pb.ue_positions[k]);
  CHECK(pa.oos_position == pb.oos_position);
}

TEST_CASE("large-scale gains follow the formula with the mast height folded in") {
  SystemConfig cfg;
  cfg.num_aps = 1;
  cfg.num_ues = 1;
  cfg.ap_height_diff = 5.0;

  Placement p;
  p.ap_positions = {{100.0, 100.0}};
  p.ue_positions = {{100.0, 100.0}};  // zero horizontal distance
  p.oos_position = {100.0, 40.0};     // 60 m horizontal

  const LargeScale ls = large_scale(p, cfg);
  REQUIRE(ls.beta.rows() == 1);
  REQUIRE(ls.beta.cols() == 2);

  // Hand-evaluated: distance 5 -> -30.5 - 36.7*log10(5) dB.
  const double expected_db = -30.5 - 36.7 * std::log10(5.0);
  CHECK(ls.beta(0, 0) == Catch::Approx(std::pow(10.0, expected_db / 10.0)).epsilon(1e-12));

  const double d_oos = std::sqrt(60.0 * 60.0 + 25.0);
  const double expected_oos_db = -30.5 - 36.7 * std::log10(d_oos);
  CHECK(ls.beta(0, 1) == Catch::Approx(std::pow(10.0, expected_oos_db / 10.0)).epsilon(1e-12));
}

TEST_CASE("large-scale gains are positive, bounded, and decay with distance") {
  SystemConfig cfg;
  Rng rng(7);
  const Placement p = place_entities(cfg, rng);
  const LargeScale ls = large_scale(p, cfg);
  const double bound = std::pow(10.0, -30.5 / 10.0);  // gain at 1 m
  for (int l = 0; l < ls.beta.rows(); ++l)
    for (int k = 0; k < ls.beta.cols(); ++k) {
      CHECK(ls.beta(l, k) > 0.0);
      CHECK(std::isfinite(ls.beta(l, k)));
      CHECK(ls.beta(l, k) <= bound);
    }

  // Doubling the horizontal distance lowers the gain.
  Placement near = p;
  Placement far = p;
  near.ue_positions[0] = p.ap_positions[0] + Eigen::Vector2d(20.0, 0.0);
  far.ue_positions[0] = p.ap_positions[0] + Eigen::Vector2d(40.0, 0.0);
  CHECK(large_scale(far, cfg).beta(0, 0) < large_scale(near, cfg).beta(0, 0));
}
