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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace stripesim {

/// Scalar system parameters. Powers are linear and normalized to the noise
/// power; noise_var is kept at 1 for sweeps and the uplink power is swept.
struct SystemConfig {
  int num_aps = 4;          // L, stripe length
  int antennas_per_ap = 4;  // N
  int num_ues = 5;          // K, served single-antenna users
  int pilot_len = 50;       // tau_p, channel uses spent on pilots
  int coherence_len = 200;  // tau_c, channel uses per coherence block

  // ue_power is the per-UE transmit power at the 0 dB point of the sweep. The
  // urban-microcell path gains are raw (around -60..-120 dB), so the 0 dB
  // operating point sits ~117 dB above the unit noise floor.
  double ue_power = 5.0118723362727e11;
  // Interferer transmit power; default is 3 dB below ue_power and the sweep
  // scales both together, keeping the ratio fixed.
  double oos_power = 2.5118864315096e11;
  double noise_var = 1.0;  // sigma^2

  double area_side = 500.0;      // meters, square deployment area
  double border_gap = 10.0;      // meters, UE inset from the border
  double ap_height_diff = 5.0;   // meters, AP mast height above UE level
  double rls_prior = 1e8;        // alpha, prior covariance scale of sequential LS
  std::uint64_t rng_seed = 1;
};

/// Throws std::invalid_argument naming the first violated constraint.
inline void validate(const SystemConfig& c) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (c.num_aps < 1) fail("num_aps must be >= 1");
  if (c.antennas_per_ap < 1) fail("antennas_per_ap must be >= 1");
  if (c.num_ues < 1) fail("num_ues must be >= 1");
  if (c.pilot_len <= c.num_ues) fail("pilot_len must exceed num_ues (no residual otherwise)");
  if (c.coherence_len < c.pilot_len) fail("coherence_len must be >= pilot_len");
  if (!(c.ue_power > 0.0)) fail("ue_power must be > 0");
  if (c.oos_power < 0.0) fail("oos_power must be >= 0");
  if (c.noise_var < 0.0) fail("noise_var must be >= 0");
  if (!(c.area_side > 0.0)) fail("area_side must be > 0");
  if (c.border_gap < 0.0 || 2.0 * c.border_gap >= c.area_side)
    fail("border_gap must be in [0, area_side/2)");
  if (!(c.ap_height_diff > 0.0)) fail("ap_height_diff must be > 0");
  if (!(c.rls_prior > 0.0)) fail("rls_prior must be > 0");
}

/// Parses the flat key=value config format. '#' starts a comment; blank lines
/// are ignored. Unknown keys and malformed values are errors.
inline SystemConfig parse_config(std::istream& in) {
  SystemConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");

    auto as_int = [&](int& out) {
      std::size_t pos = 0;
      out = std::stoi(value, &pos);
      if (pos != value.size())
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad integer '" + value + "'");
    };
    auto as_double = [&](double& out) {
      std::size_t pos = 0;
      out = std::stod(value, &pos);
      if (pos != value.size())
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad number '" + value + "'");
    };

    if (key == "num_aps") as_int(cfg.num_aps);
    else if (key == "antennas_per_ap") as_int(cfg.antennas_per_ap);
    else if (key == "num_ues") as_int(cfg.num_ues);
    else if (key == "pilot_len") as_int(cfg.pilot_len);
    else if (key == "coherence_len") as_int(cfg.coherence_len);
    else if (key == "ue_power") as_double(cfg.ue_power);
    else if (key == "oos_power") as_double(cfg.oos_power);
    else if (key == "noise_var") as_double(cfg.noise_var);
    else if (key == "area_side") as_double(cfg.area_side);
    else if (key == "border_gap") as_double(cfg.border_gap);
    else if (key == "ap_height_diff") as_double(cfg.ap_height_diff);
    else if (key == "rls_prior") as_double(cfg.rls_prior);
    else if (key == "rng_seed") cfg.rng_seed = std::stoull(value);
    else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  validate(cfg);
  return cfg;
}

inline SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace stripesim
