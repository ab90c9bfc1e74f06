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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "stripesim/channel.hpp"
#include "stripesim/config.hpp"
#include "stripesim/detection.hpp"
#include "stripesim/fronthaul.hpp"
#include "stripesim/oos_estimation.hpp"
#include "stripesim/projection.hpp"
#include "stripesim/rng.hpp"
#include "stripesim/topology.hpp"

namespace stripesim {

/// Monte-Carlo experiment description: one placement per setup, every method
/// run on the same realizations (paired design), uplink power swept in dB
/// relative to the configured powers.
struct ExperimentSpec {
  SystemConfig config;
  std::vector<double> power_grid_db{-10, -8, -6, -4, -2, 0};
  int num_setups = 200;
  int symbols_per_setup = 100;
  std::vector<Method> methods{Method::NoSuppression, Method::Local, Method::PhaseRotate,
                              Method::Gramian, Method::Genie};
};

struct MethodPowerStats {
  long long bit_errors = 0;
  long long bits_total = 0;
  double ber = 0.0;
  double ci95_halfwidth = 0.0;
  // One entry per setup; -1 marks a setup excluded as degenerate.
  std::vector<long long> per_setup_errors;
  // Single-trial ledger (loads are data-independent, so one trial stands for
  // all), with the payload symbols behind its payload counters.
  FronthaulLedger ledger;
  int ledger_symbols = 0;
};

struct BerReport {
  ExperimentSpec spec;
  int symbols_per_trial = 0;
  // cells[method_index][power_index], parallel to spec.methods/power_grid_db.
  std::vector<std::vector<MethodPowerStats>> cells;
  long long degenerate_trials = 0;
};

/// 95% Wilson score half-width for k errors out of n bits.
inline double wilson_halfwidth(long long errors, long long n) {
  if (n <= 0) return 0.0;
  const double z = 1.959963984540054;
  const double phat = static_cast<double>(errors) / static_cast<double>(n);
  const double z2n = z * z / static_cast<double>(n);
  return z * std::sqrt(phat * (1.0 - phat) / static_cast<double>(n) + z2n / (4.0 * n)) /
         (1.0 + z2n);
}

struct TrialResult {
  std::vector<long long> bit_errors;      // parallel to methods
  std::vector<FronthaulLedger> ledgers;   // parallel to methods
  int symbols = 0;
  bool degenerate = false;
};

/// One coherence block: pilot phase, every selected estimation scheme on the
/// same realization, then payload detection and bit counting symbol by
/// symbol. Degenerate instances (rank collapse) flag the whole trial so the
/// paired comparison stays paired.
inline TrialResult run_trial(const SystemConfig& cfg, const Placement& placement,
                             double power_db, const std::vector<Method>& methods, Rng& rng) {
  SystemConfig trial_cfg = cfg;
  const double scale = std::pow(10.0, power_db / 10.0);
  trial_cfg.ue_power = cfg.ue_power * scale;
  trial_cfg.oos_power = cfg.oos_power * scale;

  const int num_methods = static_cast<int>(methods.size());
  TrialResult result;
  result.bit_errors.assign(num_methods, 0);
  result.ledgers.assign(num_methods, FronthaulLedger(cfg.num_aps));
  result.symbols = cfg.coherence_len - cfg.pilot_len;

  const LargeScale ls = large_scale(placement, trial_cfg);
  const PilotBasis pilots = build_pilots(trial_cfg.pilot_len, trial_cfg.num_ues);
  const ChannelRealization chan = draw_channels(ls, trial_cfg, rng);
  const Eigen::VectorXcd oos_pilot = draw_oos_signal(trial_cfg, rng, trial_cfg.pilot_len);
  const PilotRx pilot_rx = synthesize_pilot_rx(chan, pilots, oos_pilot, trial_cfg, rng);
  const ChannelEstimates est = ls_estimate(pilot_rx, pilots, trial_cfg);
  const Residuals res = compute_residuals(pilot_rx, est, pilots, trial_cfg);

  // A residual at the level of reconstruction roundoff (possible only with
  // zero noise and no interferer) carries no interferer signature; the
  // estimation schemes then detect without the fictitious user instead of
  // factorizing numerical dust.
  double residual_scale = 0.0, signal_scale = 0.0;
  for (int l = 0; l < cfg.num_aps; ++l) {
    residual_scale = std::max(residual_scale, res.z_psi[l].norm());
    signal_scale = std::max(signal_scale, pilot_rx.y[l].norm());
  }
  const bool interferer_visible = residual_scale > 1e-12 * signal_scale;

  std::vector<OosEstimate> estimates(num_methods);
  std::vector<bool> has_estimate(num_methods, false);
  if (interferer_visible) {
    try {
      for (int m = 0; m < num_methods; ++m) {
        FronthaulLedger& ledger = result.ledgers[m];
        switch (methods[m]) {
          case Method::Local:
            estimates[m] = estimate_local(res);
            has_estimate[m] = true;
            break;
          case Method::Gramian:
            estimates[m] = estimate_gramian(res, ledger);
            has_estimate[m] = true;
            break;
          case Method::PhaseRotate:
            estimates[m] = estimate_phase_rotate(res, ledger);
            has_estimate[m] = true;
            break;
          case Method::Centralized:
            estimates[m] = estimate_centralized(res, &ledger);
            has_estimate[m] = true;
            break;
          case Method::NoSuppression:
          case Method::Genie:
            break;
        }
      }
    } catch (const ZeroResidualError&) {
      for (int m = 0; m < num_methods; ++m) has_estimate[m] = false;
    }
  }

  // With zero noise the RLS innovation goes singular once the prior has
  // collapsed, so detection falls back to the batch solver (its exact limit).
  const bool noiseless = trial_cfg.noise_var == 0.0;

  std::vector<std::vector<Eigen::MatrixXcd>> augmented(num_methods);
  for (int m = 0; m < num_methods; ++m)
    if (has_estimate[m]) augmented[m] = build_augmented(est, estimates[m], trial_cfg);

  const int n_sym = result.symbols;
  std::vector<std::uint8_t> bits(2 * static_cast<std::size_t>(trial_cfg.num_ues));
  try {
    for (int sym = 0; sym < n_sym; ++sym) {
      for (auto& b : bits) b = rng.bit();
      const Eigen::VectorXcd x = qpsk_modulate(bits);
      const std::complex<double> s = rng.cgaussian(trial_cfg.oos_power);
      const PayloadRx pay = synthesize_payload_rx(chan, x, s, trial_cfg, rng);

      for (int m = 0; m < num_methods; ++m) {
        FronthaulLedger& ledger = result.ledgers[m];
        Eigen::VectorXcd x_hat;
        switch (methods[m]) {
          case Method::Genie:
            x_hat = detect_genie(pay.y, chan, trial_cfg);
            break;
          case Method::NoSuppression:
            x_hat = detect_no_suppression(pay.y, est, trial_cfg,
                                          noiseless ? DetectorMode::Centralized
                                                    : DetectorMode::Sequential,
                                          noiseless ? nullptr : &ledger);
            break;
          case Method::Centralized: {
            if (has_estimate[m]) {
              x_hat = detect_centralized(pay.y, augmented[m], &ledger).x_hat;
            } else {
              x_hat = detect_no_suppression(pay.y, est, trial_cfg, DetectorMode::Centralized,
                                            nullptr);
            }
            break;
          }
          case Method::Local:
          case Method::Gramian:
          case Method::PhaseRotate: {
            if (has_estimate[m]) {
              if (noiseless) {
                x_hat = detect_centralized(pay.y, augmented[m], nullptr).x_hat;
              } else {
                x_hat = detect_sequential(pay.y, augmented[m], trial_cfg, &ledger).x_hat;
              }
            } else {
              x_hat = detect_no_suppression(pay.y, est, trial_cfg,
                                            noiseless ? DetectorMode::Centralized
                                                      : DetectorMode::Sequential,
                                            nullptr);
            }
            break;
          }
        }
        const auto decided = qpsk_demodulate(x_hat);
        for (std::size_t b = 0; b < bits.size(); ++b)
          if (decided[b] != bits[b]) ++result.bit_errors[m];
      }
    }
  } catch (const RankDeficientError&) {
    result.degenerate = true;
  } catch (const SingularInnovationError&) {
    result.degenerate = true;
  }
  return result;
}

namespace detail {

inline int thread_budget(std::size_t work_items) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* env = std::getenv("STRIPE_SIM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) threads = std::min(threads, cap);
  }
  if (work_items < static_cast<std::size_t>(threads)) threads = static_cast<int>(work_items);
  return std::max(threads, 1);
}

constexpr std::uint64_t kPlacementStream = 0xffffffffffffffffULL;

}  // namespace detail

/// Runs the full sweep. Trials are independent work items with seeds derived
/// from (master seed, setup, power), so the report is identical for any
/// thread count. symbols_per_setup caps the payload symbols per block.
inline BerReport run_experiment(const ExperimentSpec& spec) {
  validate(spec.config);
  if (spec.power_grid_db.empty()) throw std::invalid_argument("experiment: empty power grid");
  if (!std::is_sorted(spec.power_grid_db.begin(), spec.power_grid_db.end()))
    throw std::invalid_argument("experiment: power grid must be sorted");
  if (spec.num_setups < 1) throw std::invalid_argument("experiment: need at least one setup");
  if (spec.symbols_per_setup < 1) throw std::invalid_argument("experiment: need >= 1 symbol");
  if (spec.methods.empty()) throw std::invalid_argument("experiment: no methods selected");

  const SystemConfig& cfg = spec.config;
  const int num_methods = static_cast<int>(spec.methods.size());
  const int num_powers = static_cast<int>(spec.power_grid_db.size());
  const int num_setups = spec.num_setups;
  const int n_sym = std::min(cfg.coherence_len - cfg.pilot_len, spec.symbols_per_setup);

  std::vector<Placement> placements;
  placements.reserve(num_setups);
  for (int si = 0; si < num_setups; ++si) {
    Rng prng(derive_seed(cfg.rng_seed, si, detail::kPlacementStream));
    placements.push_back(place_entities(cfg, prng));
  }

  struct Slot {
    TrialResult trial;
  };
  std::vector<Slot> grid(static_cast<std::size_t>(num_setups) * num_powers);

  const std::size_t total = grid.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const int si = static_cast<int>(idx / num_powers);
      const int pi = static_cast<int>(idx % num_powers);
      Rng rng(derive_seed(cfg.rng_seed, si, pi));
      // symbols_per_setup caps the payload length of the block.
      SystemConfig capped = cfg;
      capped.coherence_len = capped.pilot_len + n_sym;
      grid[idx].trial =
          run_trial(capped, placements[si], spec.power_grid_db[pi], spec.methods, rng);
    }
  };

  const int threads = detail::thread_budget(total);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BerReport report;
  report.spec = spec;
  report.symbols_per_trial = n_sym;
  report.cells.assign(num_methods, std::vector<MethodPowerStats>(num_powers));
  for (int m = 0; m < num_methods; ++m) {
    for (int pi = 0; pi < num_powers; ++pi) {
      MethodPowerStats& cell = report.cells[m][pi];
      cell.per_setup_errors.assign(num_setups, -1);
      cell.ledger = FronthaulLedger(cfg.num_aps);
      for (int si = 0; si < num_setups; ++si) {
        const TrialResult& tr = grid[static_cast<std::size_t>(si) * num_powers + pi].trial;
        if (tr.degenerate) continue;
        cell.per_setup_errors[si] = tr.bit_errors[m];
        cell.bit_errors += tr.bit_errors[m];
        cell.bits_total += 2LL * cfg.num_ues * n_sym;
        if (cell.ledger_symbols == 0) {
          cell.ledger = tr.ledgers[m];
          cell.ledger_symbols = tr.symbols;
        }
      }
      cell.ber = cell.bits_total > 0
                     ? static_cast<double>(cell.bit_errors) / static_cast<double>(cell.bits_total)
                     : 0.0;
      cell.ci95_halfwidth = wilson_halfwidth(cell.bit_errors, cell.bits_total);
    }
  }
  for (int pi = 0; pi < num_powers; ++pi)
    for (int si = 0; si < num_setups; ++si)
      if (grid[static_cast<std::size_t>(si) * num_powers + pi].trial.degenerate)
        ++report.degenerate_trials;
  return report;
}

// --------------------------------------------------------------------------
// Emission. Fixed formatting so identical reports produce identical bytes.
// --------------------------------------------------------------------------

namespace detail {

inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace detail

/// ber.csv: one row per (method, power).
inline void emit_csv(const BerReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  out << "method,power_db,ber,ci95,bits_total\n";
  for (std::size_t m = 0; m < report.spec.methods.size(); ++m) {
    for (std::size_t pi = 0; pi < report.spec.power_grid_db.size(); ++pi) {
      const auto& cell = report.cells[m][pi];
      out << method_name(report.spec.methods[m]) << ','
          << detail::fmt("%.6g", report.spec.power_grid_db[pi]) << ','
          << detail::fmt("%.8e", cell.ber) << ',' << detail::fmt("%.8e", cell.ci95_halfwidth)
          << ',' << cell.bits_total << '\n';
    }
  }
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

/// fronthaul.csv: measured per-link real-symbol counts from a representative
/// trial. Pilot counts are per coherence block, payload counts per symbol
/// period, the return broadcast is listed apart.
inline void emit_fronthaul_csv(const BerReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_fronthaul_csv: cannot open " + path);
  out << "method,phase,link,real_symbols\n";
  for (std::size_t m = 0; m < report.spec.methods.size(); ++m) {
    const Method method = report.spec.methods[m];
    if (method == Method::Genie) continue;  // no fronthaul protocol
    const auto& cell = report.cells[m].front();
    if (cell.ledger_symbols == 0) continue;  // every trial degenerate
    for (std::size_t link = 0; link < cell.ledger.per_link.size(); ++link) {
      const auto& counters = cell.ledger.per_link[link];
      const long long per_symbol = counters.payload_phase / cell.ledger_symbols;
      out << method_name(method) << ",pilot," << link + 1 << ',' << counters.pilot_phase << '\n';
      out << method_name(method) << ",payload_per_symbol," << link + 1 << ',' << per_symbol
          << '\n';
      out << method_name(method) << ",return_broadcast," << link + 1 << ',' << counters.broadcast
          << '\n';
    }
  }
  if (!out) throw std::runtime_error("emit_fronthaul_csv: write failed for " + path);
}

/// plotdata.dat: comma-separated, power column then one BER series per
/// method, ready for external plotting tools.
inline void emit_plotdata(const BerReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plotdata: cannot open " + path);
  out << "# power_db";
  for (const Method m : report.spec.methods) out << ',' << method_name(m);
  out << '\n';
  for (std::size_t pi = 0; pi < report.spec.power_grid_db.size(); ++pi) {
    out << detail::fmt("%.6g", report.spec.power_grid_db[pi]);
    for (std::size_t m = 0; m < report.spec.methods.size(); ++m)
      out << ',' << detail::fmt("%.8e", report.cells[m][pi].ber);
    out << '\n';
  }
  if (!out) throw std::runtime_error("emit_plotdata: write failed for " + path);
}

}  // namespace stripesim
