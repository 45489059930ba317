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

// Acceptance checks. Each criterion prints one PASS/FAIL line with the
// measured quantity and its tolerance. `acceptance --criterion N` runs one
// criterion; with no arguments all run. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "eprcrit.hpp"

using namespace eprcrit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const StateSpec kPaperState = StateSpec::engineered(std::sqrt(0.566), std::sqrt(0.240));

// 1. h(X) + h(P) >= ln(pi e) - 2e-3 for >= 50 random states on 1024^2.
Outcome entropic_ur_floor() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = INFINITY;
  std::string worst_state;
  int states = 0;
  for (int k = 0; k < 60; ++k) {
    StateSpec spec = StateSpec::hermite_gauss(0);
    switch (k % 3) {
      case 0:
        spec = StateSpec::hermite_gauss(static_cast<int>(u(rng) * 9));
        break;
      case 1:
        spec = StateSpec::engineered(0.3 + 2.7 * u(rng), 0.3 + 2.7 * u(rng));
        break;
      default: {
        const double w = 0.5 + 1.5 * u(rng);
        const double root_a = (0.3 + 0.7 * u(rng)) * w;
        const double k_pump = 5.0 + 10.0 * u(rng);
        spec = StateSpec::sinc_spdc(4.0 * k_pump * root_a * root_a, k_pump, w);
      }
    }
    const auto d = state_distributions(spec);
    for (auto p : {Party::A, Party::B}) {
      const double excess = entropic_ur_check(marginal(d.x, p), marginal(d.p, p)).value - kLnPiE;
      if (excess < worst) {
        worst = excess;
        worst_state = spec.describe();
      }
    }
    ++states;
  }
  return {states >= 50 && worst >= -2e-3,
          fmt("%d states, min h(X)+h(P)-ln(pi e) = %.2e (>= -2e-3) at %s", states, worst, worst_state.c_str())};
}

// 2. Product Gaussian saturates both EPR bounds.
Outcome gaussian_saturation() {
  const auto d = state_distributions(StateSpec::hermite_gauss(0));
  double dv = 0.0, de = 0.0;
  for (auto dir : {Direction::a_given_b, Direction::b_given_a}) {
    dv = std::max(dv, std::abs(variance_epr(d.x, d.p, dir).value - 0.25));
    de = std::max(de, std::abs(entropic_epr(d.x, d.p, dir).value - kLnPiE));
  }
  return {dv <= 1e-4 && de <= 2e-3, fmt("|var - 0.25| = %.2e (<= 1e-4), |ent - ln(pi e)| = %.2e (<= 2e-3)", dv, de)};
}

// 3. Hermite-Gauss n = 1..5: entropic violated, variance not.
Outcome hermite_scan() {
  bool ok = true;
  std::string rows;
  for (int n = 1; n <= 5; ++n) {
    const auto d = state_distributions(StateSpec::hermite_gauss(n));
    const auto v = variance_epr(d.x, d.p, Direction::a_given_b);
    const auto e = entropic_epr(d.x, d.p, Direction::a_given_b);
    ok = ok && e.value < kLnPiE && v.value >= 0.25;
    rows += fmt(" n=%d:(%.4f, %.4f)", n, v.value, e.value);
  }
  return {ok, "(variance product, entropic sum):" + rows};
}

// 4. Variance-ratio threshold on a 2048^2 grid.
double variance_product_at(double rho, const GridOptions& grid) {
  const auto d = state_distributions(StateSpec::engineered(1.0, std::sqrt(rho)), grid);
  return variance_epr(d.x, d.p, Direction::a_given_b).value;
}

Outcome threshold() {
  GridOptions grid;
  grid.points = 2048;
  grid.extent = 8.0;
  double lo = 1.0, hi = 20.0;
  if (!(variance_product_at(lo, grid) > 0.25 && variance_product_at(hi, grid) < 0.25)) {
    return {false, "bracket [1, 20] does not straddle 0.25"};
  }
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (variance_product_at(mid, grid) > 0.25 ? lo : hi) = mid;
  }
  const double rho = 0.5 * (lo + hi);
  return {std::abs(rho - 6.615) <= 0.033,
          fmt("sigma_-^2/sigma_+^2 = %.4f (6.615 +- 0.033), width ratio %.4f", rho, std::sqrt(rho))};
}

// 5. Exact-grid entropic sum of the experimental state.
Outcome theory_value() {
  const auto d = state_distributions(kPaperState);
  const double ab = entropic_epr(d.x, d.p, Direction::a_given_b).value;
  const double ba = entropic_epr(d.x, d.p, Direction::b_given_a).value;
  GridOptions fine;
  fine.points = 2048;
  fine.extent = 8.0;
  const auto f = state_distributions(kPaperState, fine);
  const double ab_fine = entropic_epr(f.x, f.p, Direction::a_given_b).value;
  return {std::abs(ab - 1.91) <= 0.02 && std::abs(ba - 1.91) <= 0.02,
          fmt("h(X_A|X_B)+h(P_A|P_B) = %.4f, B|A %.4f (1.91 +- 0.02); 2048^2 grid gives %.4f", ab, ba, ab_fine)};
}

// 6. Twenty seeded virtual experiments at the experimental configuration.
Outcome virtual_experiments() {
  constexpr std::uint64_t kCountsX = 100000000;
  constexpr std::uint64_t kCountsP = 300;
  const auto expected = expected_experiment(kPaperState);
  int entropic_ok = 0, variance_ok = 0, runs = 0;
  double sigma_sum = 0.0, ent_sum = 0.0, var_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto v = sample_experiment(expected, kCountsX, kCountsP, seed);
    bool ent = true, var = true;
    for (auto dir : {Direction::a_given_b, Direction::b_given_a}) {
      const auto e = criterion_with_uncertainty(v.x, v.p, CriterionKind::entropic_epr, dir);
      const auto w = criterion_with_uncertainty(v.x, v.p, CriterionKind::variance_epr, dir);
      ent = ent && e.value >= 1.85 && e.value <= 2.05 && e.significance_sigmas.value_or(0.0) >= 3.0;
      var = var && w.value >= 0.35 && w.value <= 0.60 && !w.violated;
      sigma_sum += *e.uncertainty;
      ent_sum += e.value;
      var_sum += w.value;
    }
    entropic_ok += ent;
    variance_ok += var;
    ++runs;
  }
  const double mean_sigma = sigma_sum / (2 * runs);
  const bool pass = entropic_ok >= 18 && variance_ok == runs && mean_sigma > 0.03 && mean_sigma < 0.05;
  return {pass, fmt("entropic in [1.85,2.05] and >= 3 sigma: %d/20 (>= 18); variance in [0.35,0.60]: %d/20; "
                    "mean entropic sum %.3f +- %.3f, mean variance product %.3f",
                    entropic_ok, variance_ok, ent_sum / (2 * runs), mean_sigma, var_sum / (2 * runs))};
}

// 7. Estimator identities on random distributions and a binned Gaussian.
Outcome estimator_oracle() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_chain = 0.0;
  bool variance_order = true;
  for (int k = 0; k < 100; ++k) {
    Matrix<double> m(16, 16);
    for (auto& v : m.flat()) v = u(rng) < 0.2 ? 0.0 : u(rng);
    m(0, 0) += 1e-3;
    const auto d = normalize(m, Axis(0.0, 0.1, 16), Axis(-1.0, 0.3, 16));
    for (auto p : {Party::A, Party::B}) {
      worst_chain = std::max(worst_chain, std::abs(conditional_entropy_direct(d, p) - conditional_entropy_chain(d, p)));
      variance_order = variance_order && inferred_variance(d, p) <= variance(marginal(d, p)) + 1e-12;
    }
  }
  const Axis axis = Axis::centered(0.02, 801);
  std::vector<double> mass(axis.count());
  double total = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    total += mass[i] = std::exp(-0.5 * axis.position(i) * axis.position(i));
  }
  for (auto& v : mass) v /= total;
  const double h = differential_entropy(Marginal(axis, mass));
  const double dh = std::abs(h - 0.5 * std::log(2 * std::numbers::pi * std::numbers::e));
  return {worst_chain <= 1e-9 && variance_order && dh <= 1e-3,
          fmt("max |direct - chain| = %.1e (<= 1e-9), inferred <= marginal variance: %s, "
              "|h(binned N(0,1)) - ln(2 pi e)/2| = %.1e (<= 1e-3)",
              worst_chain, variance_order ? "yes" : "no", dh)};
}

// 8. Key rate positive exactly when the B|A entropic criterion is violated.
Outcome keyrate_equivalence() {
  std::vector<double> sums;
  for (int n = 0; n <= 5; ++n) {
    const auto d = state_distributions(StateSpec::hermite_gauss(n));
    sums.push_back(entropic_epr(d.x, d.p, Direction::b_given_a).value);
  }
  for (double s : {0.3, 0.6, 1.0, 3.0}) {
    const auto d = state_distributions(StateSpec::engineered(1.0, s));
    sums.push_back(entropic_epr(d.x, d.p, Direction::b_given_a).value);
  }
  const auto sinc = state_distributions(StateSpec::sinc_spdc(2.0, 10.0, 1.0));
  sums.push_back(entropic_epr(sinc.x, sinc.p, Direction::b_given_a).value);
  for (double s : {kLnPiE, std::nextafter(kLnPiE, 0.0), std::nextafter(kLnPiE, 3.0), 1.99}) sums.push_back(s);
  int mismatches = 0;
  for (double s : sums) {
    const bool key = keyrate_report(s).violated;
    const bool epr = make_report(CriterionKind::entropic_epr, Direction::b_given_a, s).violated;
    mismatches += key != epr;
  }
  const double k199 = keyrate_lower_bound(1.99);
  return {mismatches == 0 && std::abs(k199 - 0.155) <= 5e-4,
          fmt("%zu states, %d mismatches; bound at sum 1.99 = %.4f (0.155 +- 5e-4)", sums.size(), mismatches, k199)};
}

// 9. Noise-free simulate -> ingest -> criteria equals states -> criteria.
Outcome pipeline_equivalence() {
  const Optics optics;
  const StateSpec specs[] = {StateSpec::hermite_gauss(0), StateSpec::hermite_gauss(3), kPaperState};
  double worst = 0.0;
  for (const auto& spec : specs) {
    GridOptions o;
    o.points = 512;
    const Axis x = default_position_axes(spec, o).first;
    const Axis p = momentum_axis(x);
    const Axis det_x(x.offset() / optics.gamma_x, x.step() / optics.gamma_x, x.count(), Unit::length);
    const Axis det_p(p.offset() / optics.gamma_p, p.step() / optics.gamma_p, p.count(), Unit::length);
    const auto direct = state_distributions(spec, x, x, o);
    const auto sx = to_physical_distribution(expected_rates(spec, det_x, det_x, Variable::x, optics.gamma_x),
                                             {Variable::x, det_x.step(), optics.gamma_x, det_x.offset(), det_x.offset()});
    const auto sp = to_physical_distribution(expected_rates(spec, det_p, det_p, Variable::p, optics.gamma_p),
                                             {Variable::p, det_p.step(), optics.gamma_p, det_p.offset(), det_p.offset()});
    for (auto dir : {Direction::a_given_b, Direction::b_given_a}) {
      worst = std::max(worst, std::abs(entropic_epr(sx.dist, sp.dist, dir).value -
                                       entropic_epr(direct.x, direct.p, dir).value));
      worst = std::max(worst, std::abs(variance_epr(sx.dist, sp.dist, dir).value -
                                       variance_epr(direct.x, direct.p, dir).value));
    }
  }
  return {worst <= 1e-6, fmt("3 states, max |difference| = %.1e (<= 1e-6)", worst)};
}

// 10. write -> parse -> write is byte-identical for random valid tables.
Outcome file_round_trip() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(2, 20);
  std::uniform_real_distribution<double> real(-50.0, 50.0);
  std::geometric_distribution<std::int64_t> count(0.001);
  int identical = 0;
  for (int k = 0; k < 200; ++k) {
    CountTable t;
    t.geometry = {k % 2 ? Variable::x : Variable::p, std::abs(real(rng)) + 1e-9, std::abs(real(rng)) + 1e-9,
                  k % 4 ? real(rng) : 0.0, k % 3 ? real(rng) : 0.0};
    t.counts = Matrix<std::int64_t>(dim(rng), dim(rng));
    for (auto& c : t.counts.flat()) c = count(rng);
    t.counts(0, 0) += 1;
    const std::string text = write_count_table(t);
    identical += write_count_table(parse_count_table(text)) == text;
  }
  return {identical == 200, fmt("%d/200 byte-identical", identical)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria{
    {"entropic uncertainty floor", entropic_ur_floor},
    {"Gaussian saturation", gaussian_saturation},
    {"Hermite-Gauss scan n=1..5", hermite_scan},
    {"variance threshold", threshold},
    {"theory value 1.91", theory_value},
    {"virtual experiments", virtual_experiments},
    {"estimator oracle", estimator_oracle},
    {"key-rate equivalence", keyrate_equivalence},
    {"pipeline equivalence", pipeline_equivalence},
    {"file round trip", file_round_trip},
};

bool run_one(std::size_t index) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = kCriteria[index].run();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index + 1, kCriteria[index].name,
              o.detail.c_str(), secs);
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    const int n = std::atoi(argv[2]);
    if (n < 1 || n > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", kCriteria.size());
      return 2;
    }
    return run_one(n - 1) ? 0 : 1;
  }
  if (argc != 1) {
    std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
    return 2;
  }
  int failed = 0;
  for (std::size_t k = 0; k < kCriteria.size(); ++k) failed += !run_one(k);
  return failed == 0 ? 0 : 1;
}
