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

// Walks one coherence block end to end on a small deployment and prints what
// the stripe carries: per-link pilot-phase loads for each estimation scheme,
// the quality of the interferer estimates, and payload bit errors.

#include <cstdio>

#include "stripesim/stripesim.hpp"

using namespace stripesim;

int main() {
  SystemConfig cfg;
  cfg.num_aps = 4;
  cfg.antennas_per_ap = 4;
  cfg.num_ues = 5;
  cfg.pilot_len = 50;
  cfg.coherence_len = 60;  // 10 payload symbols for the walkthrough
  cfg.rng_seed = 7;
  validate(cfg);

  Rng placement_rng(derive_seed(cfg.rng_seed, 0, 0xffffffffffffffffULL));
  const Placement placement = place_entities(cfg, placement_rng);

  std::printf("deployment: %d APs on the border of a %.0f m square, %d UEs + 1 interferer\n",
              cfg.num_aps, cfg.area_side, cfg.num_ues);
  for (int l = 0; l < cfg.num_aps; ++l)
    std::printf("  AP %d at (%6.1f, %6.1f)\n", l + 1, placement.ap_positions[l].x(),
                placement.ap_positions[l].y());

  const std::vector<Method> methods{Method::NoSuppression, Method::Local, Method::PhaseRotate,
                                    Method::Gramian, Method::Centralized, Method::Genie};
  Rng trial_rng(derive_seed(cfg.rng_seed, 0, 0));
  const TrialResult trial = run_trial(cfg, placement, /*power_db=*/0.0, methods, trial_rng);

  std::printf("\npilot-phase fronthaul (real symbols per link):\n");
  std::printf("  %-14s", "link");
  for (int l = 1; l <= cfg.num_aps; ++l) std::printf("%8d", l);
  std::printf("\n");
  for (std::size_t m = 0; m < methods.size(); ++m) {
    if (methods[m] == Method::Genie) continue;
    std::printf("  %-14s", method_name(methods[m]));
    for (const auto& link : trial.ledgers[m].per_link) std::printf("%8lld", link.pilot_phase);
    std::printf("\n");
  }

  std::printf("\npayload bit errors over %d symbols (%d bits each):\n", trial.symbols,
              2 * cfg.num_ues);
  for (std::size_t m = 0; m < methods.size(); ++m)
    std::printf("  %-14s %lld\n", method_name(methods[m]), trial.bit_errors[m]);
  return 0;
}
