// Copyright 2026 The eprcrit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace eprcrit;
using namespace eprcrit::cli;

namespace {

const std::map<std::string, Format> kFormats{{"human", Format::human}, {"csv", Format::csv}};
const std::map<std::string, Family> kFamilies{
    {"hermite", Family::hermite}, {"engineered", Family::engineered}, {"sinc", Family::sinc}};
const std::map<std::string, UncertaintyMethod> kMethods{{"analytic", UncertaintyMethod::analytic_first_order},
                                                         {"bootstrap", UncertaintyMethod::bootstrap}};

void add_format(CLI::App* app, Format& f) {
  app->add_option("--format", f, "Output format")->transform(CLI::CheckedTransformer(kFormats));
}

void add_grid(CLI::App* app, GridOptions& g) {
  app->add_option("--grid-points", g.points, "Grid points per axis")->check(CLI::Range(4, 1 << 14));
  app->add_option("--grid-extent", g.extent, "Grid half-width in characteristic widths")
      ->check(CLI::PositiveNumber);
}

void add_state(CLI::App* app, StateOptions& s) {
  app->add_option("--state", s.family, "State family")->transform(CLI::CheckedTransformer(kFamilies));
  app->add_option("--n", s.n, "Hermite-Gauss order")->check(CLI::NonNegativeNumber);
  app->add_option("--sigma-plus", s.sigma_plus, "Engineered state sigma_+ (mm)");
  app->add_option("--sigma-minus", s.sigma_minus, "Engineered state sigma_- (mm)");
  app->add_option("--crystal-length", s.crystal_length, "Sinc state crystal length L (mm)");
  app->add_option("--pump-wavenumber", s.pump_wavenumber, "Sinc state pump wave number K (1/mm)");
  app->add_option("--pump-width", s.pump_width, "Sinc state pump width w (mm)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EPR criteria for bipartite continuous-variable states and coincidence-count tables"};
  app.require_subcommand(1);

  ScanOptions scan;
  auto* scan_cmd = app.add_subcommand("scan-n", "Criteria for Hermite-Gauss states n = 0..n-max");
  scan_cmd->add_option("--n-max", scan.n_max, "Largest order")->check(CLI::NonNegativeNumber);
  add_grid(scan_cmd, scan.grid);
  add_format(scan_cmd, scan.format);

  ThresholdOptions threshold;
  std::vector<double> bracket{threshold.bracket_lo, threshold.bracket_hi};
  auto* threshold_cmd =
      app.add_subcommand("threshold", "Variance ratio sigma_-^2/sigma_+^2 where the variance criterion turns on");
  threshold_cmd->add_option("--ratio-bracket", bracket, "Search bracket lo hi")->expected(2);
  threshold_cmd->add_option("--tolerance", threshold.tolerance, "Bracket width at which to stop");
  add_grid(threshold_cmd, threshold.grid);
  add_format(threshold_cmd, threshold.format);

  AnalyzeOptions analyze;
  std::string method = "analytic";
  auto* analyze_cmd = app.add_subcommand("analyze", "Criteria with error bars from an x and a p count table");
  analyze_cmd->add_option("file_x", analyze.file_x, "Position count table")->required();
  analyze_cmd->add_option("file_p", analyze.file_p, "Momentum count table")->required();
  analyze_cmd->add_option("--method", method, "Uncertainty estimator")->check(CLI::IsMember({"analytic", "bootstrap"}));
  analyze_cmd->add_option("--bootstrap-samples", analyze.uncertainty.bootstrap_samples, "Bootstrap replicas")
      ->check(CLI::Range(100, 1000000));
  analyze_cmd->add_option("--seed", analyze.uncertainty.seed, "Bootstrap seed");
  add_format(analyze_cmd, analyze.format);

  SimulateOptions simulate;
  std::uint64_t counts = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Write a virtual x and p coincidence scan");
  add_state(simulate_cmd, simulate.state);
  simulate_cmd->add_option("--counts", counts, "Mean total counts of both tables");
  simulate_cmd->add_option("--counts-x", simulate.counts_x, "Mean total counts of the x table");
  simulate_cmd->add_option("--counts-p", simulate.counts_p, "Mean total counts of the p table");
  simulate_cmd->add_option("--seed", simulate.seed, "Sampling seed");
  simulate_cmd->add_option("--step-x", simulate.optics.step_x_mm, "Detector step in the image plane (mm)");
  simulate_cmd->add_option("--step-p", simulate.optics.step_p_mm, "Detector step in the Fourier plane (mm)");
  simulate_cmd->add_option("--gamma-x", simulate.optics.gamma_x, "Detector-to-position scale");
  simulate_cmd->add_option("--gamma-p", simulate.optics.gamma_p, "Detector-to-momentum scale (1/mm^2)");
  simulate_cmd->add_option("--out-x", simulate.out_x, "Output path of the x table");
  simulate_cmd->add_option("--out-p", simulate.out_p, "Output path of the p table");

  TheoryOptions theory;
  auto* theory_cmd = app.add_subcommand("theory", "Noise-free criteria of a state on a grid");
  add_state(theory_cmd, theory.state);
  add_grid(theory_cmd, theory.grid);
  add_format(theory_cmd, theory.format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*scan_cmd) return cmd_scan_n(scan, std::cout);
    if (*threshold_cmd) {
      threshold.bracket_lo = bracket[0];
      threshold.bracket_hi = bracket[1];
      return cmd_threshold(threshold, std::cout);
    }
    if (*analyze_cmd) {
      analyze.uncertainty.method = kMethods.at(method);
      return cmd_analyze(analyze, std::cout);
    }
    if (*simulate_cmd) {
      // --counts sets both tables unless a per-table value is also given.
      if (simulate_cmd->count("--counts") > 0) {
        if (simulate_cmd->count("--counts-x") == 0) simulate.counts_x = counts;
        if (simulate_cmd->count("--counts-p") == 0) simulate.counts_p = counts;
      }
      return cmd_simulate(simulate, std::cout);
    }
    if (*theory_cmd) return cmd_theory(theory, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kUsage;
}
