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

// Subcommands of the eprcrit tool, kept apart from argument parsing so they
// can be driven from tests.
//
// Every run starts with `# key=value` lines listing the effective settings.
// CSV output then has one header line and one record per row. Field names:
//
//   scan-n     n,variance_product,entropic_sum,variance_bound,entropic_bound,
//              variance_violated,entropic_violated
//   threshold  variance_ratio,width_ratio,variance_product,iterations,
//              entropic_sum_below,entropic_violated_below
//   analyze,   record,kind,direction,value,bound,violated,uncertainty,
//   theory     significance_sigmas,method
//
// `record` is criterion, entropy or keyrate. Entropy records name the
// quantity in `kind` (h_xa, h_xa_xb, h_xa_given_xb, ... for h(X_A),
// h(X_A,X_B), h(X_A|X_B)) and leave bound and violation empty.

#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eprcrit.hpp"

namespace eprcrit::cli {

enum class Format { human, csv };

enum ExitCode : int { kOk = 0, kUsage = 2, kParse = 3, kNumerical = 4, kIo = 5 };

inline int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::usage: return kUsage;
    case ErrorCategory::parse: return kParse;
    case ErrorCategory::numerical: return kNumerical;
    case ErrorCategory::io: return kIo;
  }
  return kUsage;
}

enum class Family { hermite, engineered, sinc };

struct StateOptions {
  Family family = Family::engineered;
  int n = 0;
  double sigma_plus = std::sqrt(0.566);
  double sigma_minus = std::sqrt(0.240);
  double crystal_length = 2.0;
  double pump_wavenumber = 10.0;
  double pump_width = 1.0;

  StateSpec spec() const {
    switch (family) {
      case Family::hermite: return StateSpec::hermite_gauss(n);
      case Family::engineered: return StateSpec::engineered(sigma_plus, sigma_minus);
      case Family::sinc: return StateSpec::sinc_spdc(crystal_length, pump_wavenumber, pump_width);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown state family");
  }
};

struct ScanOptions {
  int n_max = 5;
  GridOptions grid;
  Format format = Format::human;
};

struct ThresholdOptions {
  double bracket_lo = 1.0;
  double bracket_hi = 20.0;
  double tolerance = 1e-4;
  GridOptions grid{1024, 8.0};
  Format format = Format::human;
};

struct AnalyzeOptions {
  std::string file_x;
  std::string file_p;
  UncertaintyConfig uncertainty;
  Format format = Format::human;
};

struct SimulateOptions {
  StateOptions state;
  Optics optics;
  std::uint64_t counts_x = 100000000;
  std::uint64_t counts_p = 300;
  std::uint64_t seed = 1;
  std::string out_x = "counts_x.txt";
  std::string out_p = "counts_p.txt";
};

struct TheoryOptions {
  StateOptions state;
  GridOptions grid;
  Format format = Format::human;
};

namespace detail {

inline std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

inline std::string_view yes_no(bool b) { return b ? "yes" : "no"; }

inline void header(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) out << "# " << k << '=' << v << '\n';
}

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::hermite: return "hermite";
    case Family::engineered: return "engineered";
    case Family::sinc: return "sinc";
  }
  return "?";
}

inline std::vector<std::pair<std::string, std::string>> state_header(const StateOptions& s) {
  std::vector<std::pair<std::string, std::string>> kv{{"state", std::string(family_name(s.family))}};
  switch (s.family) {
    case Family::hermite:
      kv.emplace_back("n", std::to_string(s.n));
      break;
    case Family::engineered:
      kv.emplace_back("sigma_plus", num(s.sigma_plus, 17));
      kv.emplace_back("sigma_minus", num(s.sigma_minus, 17));
      break;
    case Family::sinc:
      kv.emplace_back("crystal_length", num(s.crystal_length, 17));
      kv.emplace_back("pump_wavenumber", num(s.pump_wavenumber, 17));
      kv.emplace_back("pump_width", num(s.pump_width, 17));
      break;
  }
  return kv;
}

inline void grid_header(std::vector<std::pair<std::string, std::string>>& kv, const GridOptions& g) {
  kv.emplace_back("grid_points", std::to_string(g.points));
  kv.emplace_back("grid_extent", num(g.extent, 17));
  kv.emplace_back("tail_tolerance", num(g.tail_tolerance, 17));
}

constexpr std::string_view kReportCsvHeader =
    "record,kind,direction,value,bound,violated,uncertainty,significance_sigmas,method";

inline void report_csv(std::ostream& out, std::string_view record, const CriterionReport& r) {
  out << record << ',' << to_string(r.kind) << ',' << to_string(r.direction) << ',' << num(r.value, 17) << ','
      << num(r.bound, 17) << ',' << (r.violated ? "true" : "false") << ',';
  if (r.uncertainty) out << num(*r.uncertainty, 17);
  out << ',';
  if (r.significance_sigmas) out << num(*r.significance_sigmas, 17);
  out << ',';
  if (r.method) out << to_string(*r.method);
  out << '\n';
}

inline void report_human(std::ostream& out, const CriterionReport& r) {
  out << std::left << std::setw(13) << to_string(r.kind) << std::setw(7) << to_string(r.direction)
      << std::right << std::setw(10) << num(r.value);
  if (r.uncertainty) out << " +- " << std::left << std::setw(9) << num(*r.uncertainty, 2) << std::right;
  out << "  bound " << num(r.bound) << "  " << (r.kind == CriterionKind::keyrate ? "key" : "violated") << ": "
      << yes_no(r.violated);
  if (r.significance_sigmas) out << " (" << num(*r.significance_sigmas, 3) << " sigma)";
  out << '\n';
}

inline void entropy_csv(std::ostream& out, std::string_view name, const EntropyValue& e) {
  out << "entropy," << name << ",," << num(e.value, 17) << ",,,";
  if (e.uncertainty) out << num(*e.uncertainty, 17);
  out << ",,analytic\n";
}

inline void entropy_human(std::ostream& out, std::string_view name, const EntropyValue& e) {
  out << "  " << std::left << std::setw(10) << name << std::right << std::setw(10) << num(e.value);
  if (e.uncertainty) out << " +- " << num(*e.uncertainty, 2);
  out << '\n';
}

}  // namespace detail

/// Exact-grid criteria for Hermite-Gauss states n = 0..n_max.
inline int cmd_scan_n(const ScanOptions& opt, std::ostream& out) {
  if (opt.n_max < 0) throw Error(ErrorCode::InvalidArgument, "--n-max must be >= 0");
  std::vector<std::pair<std::string, std::string>> kv{{"command", "scan-n"}, {"n_max", std::to_string(opt.n_max)}};
  detail::grid_header(kv, opt.grid);
  detail::header(out, kv);
  if (opt.format == Format::csv) {
    out << "n,variance_product,entropic_sum,variance_bound,entropic_bound,variance_violated,entropic_violated\n";
  } else {
    out << "   n  variance_product  entropic_sum  var_violated  ent_violated\n";
  }
  for (int n = 0; n <= opt.n_max; ++n) {
    const auto d = state_distributions(StateSpec::hermite_gauss(n), opt.grid);
    const auto v = variance_epr(d.x, d.p, Direction::a_given_b);
    const auto e = entropic_epr(d.x, d.p, Direction::a_given_b);
    if (opt.format == Format::csv) {
      out << n << ',' << detail::num(v.value, 17) << ',' << detail::num(e.value, 17) << ','
          << detail::num(v.bound, 17) << ',' << detail::num(e.bound, 17) << ',' << (v.violated ? "true" : "false")
          << ',' << (e.violated ? "true" : "false") << '\n';
    } else {
      out << std::setw(4) << n << std::setw(18) << detail::num(v.value) << std::setw(14) << detail::num(e.value)
          << std::setw(14) << detail::yes_no(v.violated) << std::setw(14) << detail::yes_no(e.violated) << '\n';
    }
  }
  return kOk;
}

struct ThresholdResult {
  double variance_ratio = 0.0;  // sigma_-^2 / sigma_+^2 at the crossing
  double variance_product = 0.0;
  int iterations = 0;
  double entropic_sum_below = 0.0;  // just below the crossing
  bool entropic_violated_below = false;
};

/// Variance product of Engineered(1, sqrt(rho)) on the given grid.
inline double engineered_variance_product(double rho, const GridOptions& grid) {
  const auto d = state_distributions(StateSpec::engineered(1.0, std::sqrt(rho)), grid);
  return variance_epr(d.x, d.p, Direction::a_given_b).value;
}

/// Bisection for the variance ratio at which the variance product of the
/// engineered state crosses 1/4, after checking that the product decreases
/// across the bracket.
inline ThresholdResult find_variance_threshold(const ThresholdOptions& opt) {
  if (!(opt.bracket_lo > 0.0) || !(opt.bracket_hi > opt.bracket_lo)) {
    throw Error(ErrorCode::InvalidArgument, "--ratio-bracket needs 0 < lo < hi");
  }
  if (!(opt.tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tolerance must be positive");
  constexpr int kProbes = 8;
  double prev = std::numeric_limits<double>::infinity();
  double f_lo = 0.0, f_hi = 0.0;
  for (int k = 0; k <= kProbes; ++k) {
    const double rho = opt.bracket_lo * std::pow(opt.bracket_hi / opt.bracket_lo, static_cast<double>(k) / kProbes);
    const double f = engineered_variance_product(rho, opt.grid);
    if (!(f < prev)) {
      throw Error(ErrorCode::NotMonotonic, "variance product does not decrease across the bracket at ratio " +
                                               detail::num(rho));
    }
    prev = f;
    if (k == 0) f_lo = f;
    if (k == kProbes) f_hi = f;
  }
  if (!(f_lo > kVarianceBound && f_hi < kVarianceBound)) {
    throw Error(ErrorCode::NoSignChange, "variance product is " + detail::num(f_lo) + " and " + detail::num(f_hi) +
                                             " at the bracket ends; 0.25 is not straddled");
  }
  ThresholdResult r;
  double lo = opt.bracket_lo, hi = opt.bracket_hi;
  while (hi - lo > opt.tolerance) {
    const double mid = 0.5 * (lo + hi);
    (engineered_variance_product(mid, opt.grid) > kVarianceBound ? lo : hi) = mid;
    ++r.iterations;
  }
  r.variance_ratio = 0.5 * (lo + hi);
  r.variance_product = engineered_variance_product(r.variance_ratio, opt.grid);
  const auto below = state_distributions(StateSpec::engineered(1.0, std::sqrt(lo)), opt.grid);
  const auto e = entropic_epr(below.x, below.p, Direction::a_given_b);
  r.entropic_sum_below = e.value;
  r.entropic_violated_below = e.violated;
  return r;
}

inline int cmd_threshold(const ThresholdOptions& opt, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> kv{{"command", "threshold"},
                                                      {"variable", "sigma_minus^2/sigma_plus^2"},
                                                      {"sigma_plus", "1"},
                                                      {"ratio_bracket", detail::num(opt.bracket_lo, 17) + "," +
                                                                            detail::num(opt.bracket_hi, 17)},
                                                      {"tolerance", detail::num(opt.tolerance, 17)}};
  detail::grid_header(kv, opt.grid);
  detail::header(out, kv);
  const ThresholdResult r = find_variance_threshold(opt);
  if (opt.format == Format::csv) {
    out << "variance_ratio,width_ratio,variance_product,iterations,entropic_sum_below,entropic_violated_below\n";
    out << detail::num(r.variance_ratio, 17) << ',' << detail::num(std::sqrt(r.variance_ratio), 17) << ','
        << detail::num(r.variance_product, 17) << ',' << r.iterations << ','
        << detail::num(r.entropic_sum_below, 17) << ',' << (r.entropic_violated_below ? "true" : "false") << '\n';
  } else {
    out << "variance criterion violated for sigma_-^2/sigma_+^2 >= " << detail::num(r.variance_ratio) << " (width ratio "
        << detail::num(std::sqrt(r.variance_ratio)) << ", " << r.iterations << " bisection steps)\n";
    out << "entropic sum just below: " << detail::num(r.entropic_sum_below)
        << "  violated: " << detail::yes_no(r.entropic_violated_below) << '\n';
  }
  return kOk;
}

namespace detail {

inline void print_reports(std::ostream& out, Format format, const std::vector<CriterionReport>& reports,
                          const std::optional<EntropyBreakdown>& breakdown) {
  if (format == Format::csv) {
    out << kReportCsvHeader << '\n';
    for (const auto& r : reports) report_csv(out, r.kind == CriterionKind::keyrate ? "keyrate" : "criterion", r);
    if (breakdown) {
      const auto& b = *breakdown;
      entropy_csv(out, "h_xa", b.x_a);
      entropy_csv(out, "h_xb", b.x_b);
      entropy_csv(out, "h_xa_xb", b.x_ab);
      entropy_csv(out, "h_pa", b.p_a);
      entropy_csv(out, "h_pb", b.p_b);
      entropy_csv(out, "h_pa_pb", b.p_ab);
      entropy_csv(out, "h_xa_given_xb", b.x_a_given_b);
      entropy_csv(out, "h_xb_given_xa", b.x_b_given_a);
      entropy_csv(out, "h_pa_given_pb", b.p_a_given_b);
      entropy_csv(out, "h_pb_given_pa", b.p_b_given_a);
    }
    return;
  }
  for (const auto& r : reports) report_human(out, r);
  if (breakdown) {
    const auto& b = *breakdown;
    out << "entropies (nats):\n";
    entropy_human(out, "h(X_A)", b.x_a);
    entropy_human(out, "h(X_B)", b.x_b);
    entropy_human(out, "h(X_A,X_B)", b.x_ab);
    entropy_human(out, "h(P_A)", b.p_a);
    entropy_human(out, "h(P_B)", b.p_b);
    entropy_human(out, "h(P_A,P_B)", b.p_ab);
    entropy_human(out, "h(X_A|X_B)", b.x_a_given_b);
    entropy_human(out, "h(X_B|X_A)", b.x_b_given_a);
    entropy_human(out, "h(P_A|P_B)", b.p_a_given_b);
    entropy_human(out, "h(P_B|P_A)", b.p_b_given_a);
  }
}

}  // namespace detail

/// All four EPR reports with uncertainties, the entropy breakdown and the
/// key-rate bound for a pair of count files.
inline int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out) {
  const CountTable tx = read_count_table(opt.file_x);
  const CountTable tp = read_count_table(opt.file_p);
  std::vector<std::pair<std::string, std::string>> kv{{"command", "analyze"},
                                                      {"file_x", opt.file_x},
                                                      {"file_p", opt.file_p},
                                                      {"method", std::string(to_string(opt.uncertainty.method))}};
  if (opt.uncertainty.method == UncertaintyMethod::bootstrap) {
    kv.emplace_back("bootstrap_samples", std::to_string(opt.uncertainty.bootstrap_samples));
    kv.emplace_back("seed", std::to_string(opt.uncertainty.seed));
  }
  kv.emplace_back("total_x", std::to_string(tx.total()));
  kv.emplace_back("total_p", std::to_string(tp.total()));
  detail::header(out, kv);

  std::vector<CriterionReport> reports;
  for (const auto kind : {CriterionKind::variance_epr, CriterionKind::entropic_epr}) {
    for (const auto dir : {Direction::a_given_b, Direction::b_given_a}) {
      reports.push_back(criterion_with_uncertainty(tx, tp, kind, dir, opt.uncertainty));
    }
  }
  const CriterionReport& ent_ba = reports.back();
  CriterionReport key = keyrate_report(ent_ba.value);
  if (ent_ba.uncertainty) {
    key.uncertainty = ent_ba.uncertainty;
    key.method = ent_ba.method;
    if (*key.uncertainty > 0.0) key.significance_sigmas = key.value / *key.uncertainty;
  }
  reports.push_back(key);
  detail::print_reports(out, opt.format, reports, entropy_breakdown(tx, tp));
  return kOk;
}

/// Samples both count tables and writes them.
inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
  if (opt.counts_x == 0 || opt.counts_p == 0) {
    throw Error(ErrorCode::InvalidArgument, "--counts must be positive");
  }
  const StateSpec spec = opt.state.spec();
  auto kv = detail::state_header(opt.state);
  kv.insert(kv.begin(), {"command", "simulate"});
  kv.emplace_back("step_x", detail::num(opt.optics.step_x_mm, 17));
  kv.emplace_back("step_p", detail::num(opt.optics.step_p_mm, 17));
  kv.emplace_back("gamma_x", detail::num(opt.optics.gamma_x, 17));
  kv.emplace_back("gamma_p", detail::num(opt.optics.gamma_p, 17));
  kv.emplace_back("counts_x", std::to_string(opt.counts_x));
  kv.emplace_back("counts_p", std::to_string(opt.counts_p));
  kv.emplace_back("seed", std::to_string(opt.seed));
  kv.emplace_back("coverage_tolerance", detail::num(kDefaultCoverageTolerance, 17));
  kv.emplace_back("out_x", opt.out_x);
  kv.emplace_back("out_p", opt.out_p);
  detail::header(out, kv);
  const ExpectedExperiment e = expected_experiment(spec, opt.optics);
  const VirtualExperiment v = sample_experiment(e, opt.counts_x, opt.counts_p, opt.seed);
  save_count_table(opt.out_x, v.x);
  save_count_table(opt.out_p, v.p);
  out << "wrote " << opt.out_x << " (" << v.x.counts.rows() << "x" << v.x.counts.cols() << ", " << v.x.total()
      << " counts)\n";
  out << "wrote " << opt.out_p << " (" << v.p.counts.rows() << "x" << v.p.counts.cols() << ", " << v.p.total()
      << " counts)\n";
  return kOk;
}

/// Noise-free criteria of a state on a position grid and its FFT momentum
/// grid.
inline int cmd_theory(const TheoryOptions& opt, std::ostream& out) {
  const StateSpec spec = opt.state.spec();
  auto kv = detail::state_header(opt.state);
  kv.insert(kv.begin(), {"command", "theory"});
  detail::grid_header(kv, opt.grid);
  detail::header(out, kv);
  const auto d = state_distributions(spec, opt.grid);
  std::vector<CriterionReport> reports;
  for (const auto kind : {CriterionKind::variance_epr, CriterionKind::entropic_epr}) {
    for (const auto dir : {Direction::a_given_b, Direction::b_given_a}) {
      reports.push_back(kind == CriterionKind::variance_epr ? variance_epr(d.x, d.p, dir)
                                                            : entropic_epr(d.x, d.p, dir));
    }
  }
  // Party A; the single-party relations for B follow by relabeling.
  const Marginal mx = marginal(d.x, Party::A);
  const Marginal mp = marginal(d.p, Party::A);
  reports.push_back(heisenberg_check(mx, mp));
  reports.push_back(entropic_ur_check(mx, mp));
  reports.push_back(keyrate_report(entropic_epr(d.x, d.p, Direction::b_given_a).value));
  detail::print_reports(out, opt.format, reports, std::nullopt);
  return kOk;
}

}  // namespace eprcrit::cli
