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

// Monte-Carlo BER sweep driver. Reads a key=value config, runs the selected
// interference-handling methods over a power grid, and writes ber.csv,
// fronthaul.csv and plotdata.dat into the output directory.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stripesim/stripesim.hpp"

namespace {

std::vector<double> parse_power_grid(const std::string& text) {
  // "a:b:step", inclusive on both ends.
  double a = 0, b = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || in.rdbuf()->in_avail() != 0)
    throw CLI::ValidationError("--powers", "expected a:b:step, got '" + text + "'");
  if (step <= 0 || b < a) throw CLI::ValidationError("--powers", "need b >= a and step > 0");
  std::vector<double> grid;
  for (double p = a; p <= b + 1e-9; p += step) grid.push_back(p);
  return grid;
}

std::vector<stripesim::Method> parse_methods(const std::string& text) {
  std::vector<stripesim::Method> methods;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::string name;
    for (char c : tok)
      if (c != ' ' && c != '\t') name.push_back(static_cast<char>(std::tolower(c)));
    if (name.empty()) continue;
    if (name == "nosuppression") methods.push_back(stripesim::Method::NoSuppression);
    else if (name == "local") methods.push_back(stripesim::Method::Local);
    else if (name == "phaserotate") methods.push_back(stripesim::Method::PhaseRotate);
    else if (name == "gramian") methods.push_back(stripesim::Method::Gramian);
    else if (name == "centralized") methods.push_back(stripesim::Method::Centralized);
    else if (name == "genie") methods.push_back(stripesim::Method::Genie);
    else throw CLI::ValidationError("--methods", "unknown method '" + tok + "'");
  }
  if (methods.empty()) throw CLI::ValidationError("--methods", "no methods selected");
  return methods;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink cell-free MIMO stripe simulator: BER sweep with fronthaul accounting"};
  app.name("simulate");

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string methods_text = "nosuppression,local,phaserotate,gramian,genie";
  std::string powers_text = "-10:0:2";
  int setups = 200;
  int symbols = 100;

  app.add_option("--config", config_path, "system config file (key=value)")->required();
  app.add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the config rng_seed");
  app.add_option("--methods", methods_text, "comma list of methods to run");
  app.add_option("--powers", powers_text, "power sweep a:b:step in dB");
  app.add_option("--setups", setups, "number of random placements");
  app.add_option("--symbols", symbols, "payload symbols per setup");

  CLI11_PARSE(app, argc, argv);

  try {
    stripesim::ExperimentSpec spec;
    spec.config = stripesim::load_config(config_path);
    if (seed_opt->count() > 0) spec.config.rng_seed = seed;
    spec.methods = parse_methods(methods_text);
    spec.power_grid_db = parse_power_grid(powers_text);
    spec.num_setups = setups;
    spec.symbols_per_setup = symbols;

    std::filesystem::create_directories(out_dir);

    const stripesim::BerReport report = stripesim::run_experiment(spec);

    const auto out = std::filesystem::path(out_dir);
    stripesim::emit_csv(report, (out / "ber.csv").string());
    stripesim::emit_fronthaul_csv(report, (out / "fronthaul.csv").string());
    stripesim::emit_plotdata(report, (out / "plotdata.dat").string());

    std::cout << "wrote " << (out / "ber.csv").string() << ", fronthaul.csv, plotdata.dat\n";
    if (report.degenerate_trials > 0)
      std::cout << "excluded " << report.degenerate_trials << " degenerate trial(s)\n";
    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
      std::cout << stripesim::method_name(spec.methods[m]) << ": ber at "
                << spec.power_grid_db.back() << " dB = " << report.cells[m].back().ber << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return 1;
  }
}
