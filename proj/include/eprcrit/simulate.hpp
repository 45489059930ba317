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

// Virtual coincidence-counting experiment.
//
// Rates come from closed-form position and momentum densities of each state
// family, written out here rather than taken from the FFT path in
// states.hpp, so that the two routes can be checked against each other.
// With u = x_A + x_B, v = x_A - x_B, P = p_A + p_B, Q = p_A - p_B:
//
//   Hermite-Gauss n   |psi|^2 ~ phi_n(u)^2 exp(-v^2)
//                     |psi~|^2 ~ phi_n(P/2)^2 exp(-Q^2/4)
//   Engineered        |psi|^2 ~ u^2 exp(-u^2/2s+^2 - v^2/2s-^2)
//                     |psi~|^2 ~ P^2 exp(-s+^2 P^2/2 - s-^2 Q^2/2)
//   Sinc SPDC         |psi~|^2 ~ exp(-w^2 P^2/2) sinc^2(a Q^2)
//                     |psi|^2 ~ exp(-u^2/2w^2) S(v/(2 sqrt a))^2,
//                     S(y) = int_0^inf sinc(t^2) cos(t y) dt
//
// phi_n is the normalized Hermite function. Each density is divided by its
// exact integral over the plane, so captured mass on a finite detector scan
// can be checked directly.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eprcrit/count_table.hpp"
#include "eprcrit/error.hpp"
#include "eprcrit/grid_prob.hpp"
#include "eprcrit/ingest.hpp"
#include "eprcrit/matrix.hpp"
#include "eprcrit/states.hpp"

namespace eprcrit {

/// Detector steps in mm and detector-to-physical scale factors.
struct Optics {
  double step_x_mm = 0.02;
  double step_p_mm = 0.05;
  double gamma_x = imaging_scale(150.0, 50.0);
  double gamma_p = fourier_scale(250.0, 884e-6);
};

namespace sim {

inline constexpr double kPi = std::numbers::pi;

// Normalized Hermite function by the stable three-term recurrence.
inline double hermite_function(int n, double t) {
  double prev = 0.0;
  double cur = std::exp(-0.5 * t * t) / std::pow(kPi, 0.25);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * t * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double sinc(double x) { return std::abs(x) < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// S(y) = int_0^inf sin(t^2)/t^2 cos(t y) dt by composite Simpson up to T
// plus the leading integration-by-parts term of the remainder. T lies past
// the stationary point t = y/2.
inline double sinc_profile(double y) {
  y = std::abs(y);
  const double upper = std::max(60.0, y + 30.0);
  const double h = 1e-3;
  const auto panels = static_cast<std::size_t>(std::ceil(upper / h / 2.0)) * 2;
  const double step = upper / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t k = 0; k <= panels; ++k) {
    const double t = step * static_cast<double>(k);
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * sinc(t * t) * std::cos(t * y);
  }
  sum *= step / 3.0;
  // sin(t^2) cos(t y) = [sin(t^2 + t y) + sin(t^2 - t y)] / 2 and
  // int_T^inf g sin(phi) ~ g(T) cos(phi(T)) / phi'(T).
  const double g = 0.5 / (upper * upper);
  sum += g * std::cos(upper * upper + upper * y) / (2.0 * upper + y);
  sum += g * std::cos(upper * upper - upper * y) / (2.0 * upper - y);
  return sum;
}

// int_R sinc^2(a Q^2) dQ = 4 sqrt(pi) / (3 sqrt(a)).
inline double sinc_square_norm(double a) { return 4.0 * std::sqrt(kPi) / (3.0 * std::sqrt(a)); }

// Density of (q_a, q_b) normalized over the plane. For the sinc position
// density `profile` supplies S at the scaled v coordinate.
template <typename Profile>
double density(const StateSpec& spec, Variable variable, double qa, double qb, Profile&& profile) {
  const double s = qa + qb;
  const double d = qa - qb;
  return spec.visit([&](const auto& f) -> double {
    using F = std::decay_t<decltype(f)>;
    if constexpr (std::is_same_v<F, HermiteGauss>) {
      if (variable == Variable::x) {
        const double h = hermite_function(f.n, s);
        return 2.0 * h * h * std::exp(-d * d) / std::sqrt(kPi);
      }
      const double h = hermite_function(f.n, 0.5 * s);
      return h * h * std::exp(-0.25 * d * d) / (2.0 * std::sqrt(kPi));
    } else if constexpr (std::is_same_v<F, Engineered>) {
      const double sp2 = f.sigma_plus * f.sigma_plus;
      const double sm2 = f.sigma_minus * f.sigma_minus;
      if (variable == Variable::x) {
        return s * s * std::exp(-s * s / (2.0 * sp2) - d * d / (2.0 * sm2)) /
               (kPi * sp2 * f.sigma_plus * f.sigma_minus);
      }
      return s * s * std::exp(-0.5 * sp2 * s * s - 0.5 * sm2 * d * d) * sp2 * f.sigma_plus * f.sigma_minus / kPi;
    } else {
      const double a = f.chirp();
      const double w = f.pump_width;
      if (variable == Variable::p) {
        const double sq = sinc(a * d * d);
        return std::exp(-0.5 * w * w * s * s) * sq * sq / (0.5 * std::sqrt(2.0 * kPi) / w * sinc_square_norm(a));
      }
      // psi(v) = (2/sqrt a) S(v / (2 sqrt a)); int |psi(v)|^2 dv = 4 pi norm.
      const double amp = 2.0 / std::sqrt(a) * profile(d / (2.0 * std::sqrt(a)));
      const double norm = 0.5 * w * std::sqrt(2.0 * kPi) * 4.0 * kPi * sinc_square_norm(a);
      return std::exp(-s * s / (2.0 * w * w)) * amp * amp / norm;
    }
  });
}

// Rough std of one party's physical variable, used to seed scan ranges.
inline double single_party_width(const StateSpec& spec, Variable variable) {
  return spec.visit([&](const auto& f) -> double {
    using F = std::decay_t<decltype(f)>;
    if constexpr (std::is_same_v<F, HermiteGauss>) {
      return variable == Variable::x ? 0.5 * std::sqrt(2.0 * f.n + 2.0) : std::sqrt(2.0 * f.n + 2.0);
    } else if constexpr (std::is_same_v<F, Engineered>) {
      return variable == Variable::x ? 0.5 * std::hypot(std::sqrt(3.0) * f.sigma_plus, f.sigma_minus)
                                     : 0.5 * std::hypot(std::sqrt(3.0) / f.sigma_plus, 1.0 / f.sigma_minus);
    } else {
      const double ra = std::sqrt(f.chirp());
      return variable == Variable::x ? 0.5 * std::hypot(f.pump_width, 2.7 * ra)
                                     : 0.5 * std::hypot(1.0 / f.pump_width, 1.0 / ra);
    }
  });
}

struct RateGrid {
  Matrix<double> rates;  // normalized to sum 1
  double captured = 0.0;  // midpoint estimate of the density mass on the scan
};

inline RateGrid midpoint_rates(const StateSpec& spec, const Axis& det_a, const Axis& det_b, Variable variable,
                               double gamma) {
  const double cell = gamma * det_a.step() * gamma * det_b.step();
  const bool shared_lattice = det_a.step() == det_b.step() && det_a.offset() == det_b.offset();
  std::unordered_map<std::int64_t, double> profile_cache;
  RateGrid out{Matrix<double>(det_a.count(), det_b.count()), 0.0};
  std::vector<double> row_sums(det_a.count(), 0.0);
  for (std::size_t i = 0; i < det_a.count(); ++i) {
    const double qa = gamma * det_a.position(i);
    for (std::size_t j = 0; j < det_b.count(); ++j) {
      const double qb = gamma * det_b.position(j);
      auto profile = [&](double y) {
        if (!shared_lattice) return sinc_profile(y);
        const auto key = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j);
        auto it = profile_cache.find(key);
        if (it == profile_cache.end()) it = profile_cache.emplace(key, sinc_profile(y)).first;
        return it->second;
      };
      const double m = density(spec, variable, qa, qb, profile) * cell;
      out.rates(i, j) = m;
      row_sums[i] += m;
    }
  }
  out.captured = accurate_sum(row_sums);
  if (!(out.captured > 0.0)) throw Error(ErrorCode::GridTooNarrow, "detector scan sees no rate");
  for (auto& r : out.rates.flat()) r /= out.captured;
  return out;
}

inline std::mt19937_64 row_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t row) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(row),
                    static_cast<std::uint32_t>(row >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace sim

/// Default captured-mass tolerance of a detector scan.
inline constexpr double kDefaultCoverageTolerance = 1e-4;

/// Midpoint-rule coincidence rates on the detector grid, normalized to sum
/// 1. Throws GridTooNarrow when the scan misses more than
/// `coverage_tolerance` of the density.
inline Matrix<double> expected_rates(const StateSpec& spec, const Axis& det_a, const Axis& det_b, Variable variable,
                                     double gamma, double coverage_tolerance = kDefaultCoverageTolerance) {
  detail::check_gamma(gamma);
  sim::RateGrid g = sim::midpoint_rates(spec, det_a, det_b, variable, gamma);
  if (g.captured < 1.0 - coverage_tolerance) {
    throw Error(ErrorCode::GridTooNarrow, spec.describe() + ": detector scan captures " +
                                              std::to_string(g.captured) + " of the " +
                                              std::string(to_string(variable)) + " rate");
  }
  return std::move(g.rates);
}

/// Smallest symmetric odd-count detector scan (in mm) at the given step that
/// captures at least 1 - coverage_tolerance of the rate.
inline Axis default_detector_axis(const StateSpec& spec, Variable variable, double step_mm, double gamma,
                                  double coverage_tolerance = kDefaultCoverageTolerance) {
  detail::check_gamma(gamma);
  if (!(step_mm > 0.0)) throw Error(ErrorCode::NonPositiveStep, "detector step must be positive");
  double half = 3.0 * sim::single_party_width(spec, variable) / gamma;
  for (int attempt = 0; attempt < 40; ++attempt) {
    const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(half / step_mm)));
    const Axis axis(-static_cast<double>(k) * step_mm, step_mm, 2 * k + 1, Unit::length);
    if (axis.count() > 8001) break;
    if (sim::midpoint_rates(spec, axis, axis, variable, gamma).captured >= 1.0 - coverage_tolerance) return axis;
    half *= 1.25;
  }
  throw Error(ErrorCode::GridTooNarrow,
              spec.describe() + ": no detector scan up to 8001 points captures the " +
                  std::string(to_string(variable)) + " rate");
}

/// Poisson counts with mean total_counts * rates, one substream per row so
/// the result depends only on (seed, stream, row).
inline CountTable sample_counts(const Matrix<double>& rates, std::uint64_t total_counts, std::uint64_t seed,
                                const TableGeometry& geometry, std::uint64_t stream = 0) {
  CountTable out{geometry, Matrix<std::int64_t>(rates.rows(), rates.cols())};
  const auto total = static_cast<double>(total_counts);
  for (std::size_t i = 0; i < rates.rows(); ++i) {
    auto engine = sim::row_engine(seed, stream, i);
    for (std::size_t j = 0; j < rates.cols(); ++j) {
      const double r = rates(i, j);
      if (r < 0.0) throw Error(ErrorCode::NegativeMass, "negative rate");
      const double mu = total * r;
      if (mu > 0.0) out.counts(i, j) = std::poisson_distribution<std::int64_t>(mu)(engine);
    }
  }
  return out;
}

/// Rates and geometry of both measurement configurations, before sampling.
struct ExpectedExperiment {
  Matrix<double> rates_x;
  Matrix<double> rates_p;
  TableGeometry geometry_x;
  TableGeometry geometry_p;
};

inline ExpectedExperiment expected_experiment(const StateSpec& spec, const Optics& optics, const Axis& det_x,
                                              const Axis& det_p,
                                              double coverage_tolerance = kDefaultCoverageTolerance) {
  if (det_x.step() != optics.step_x_mm || det_p.step() != optics.step_p_mm) {
    throw Error(ErrorCode::InvalidArgument, "detector axes do not use the optics steps");
  }
  ExpectedExperiment e;
  e.rates_x = expected_rates(spec, det_x, det_x, Variable::x, optics.gamma_x, coverage_tolerance);
  e.rates_p = expected_rates(spec, det_p, det_p, Variable::p, optics.gamma_p, coverage_tolerance);
  e.geometry_x = {Variable::x, optics.step_x_mm, optics.gamma_x, det_x.offset(), det_x.offset()};
  e.geometry_p = {Variable::p, optics.step_p_mm, optics.gamma_p, det_p.offset(), det_p.offset()};
  return e;
}

inline ExpectedExperiment expected_experiment(const StateSpec& spec, const Optics& optics = {},
                                              double coverage_tolerance = kDefaultCoverageTolerance) {
  return expected_experiment(
      spec, optics,
      default_detector_axis(spec, Variable::x, optics.step_x_mm, optics.gamma_x, coverage_tolerance),
      default_detector_axis(spec, Variable::p, optics.step_p_mm, optics.gamma_p, coverage_tolerance),
      coverage_tolerance);
}

struct VirtualExperiment {
  CountTable x;
  CountTable p;
};

/// Streams 1 and 2 of `seed` draw the x and p tables.
inline VirtualExperiment sample_experiment(const ExpectedExperiment& e, std::uint64_t counts_x,
                                           std::uint64_t counts_p, std::uint64_t seed) {
  return {sample_counts(e.rates_x, counts_x, seed, e.geometry_x, 1),
          sample_counts(e.rates_p, counts_p, seed, e.geometry_p, 2)};
}

inline VirtualExperiment run_virtual_experiment(const StateSpec& spec, const Optics& optics, std::uint64_t counts_x,
                                                std::uint64_t counts_p, std::uint64_t seed) {
  return sample_experiment(expected_experiment(spec, optics), counts_x, counts_p, seed);
}

inline VirtualExperiment run_virtual_experiment(const StateSpec& spec, const Optics& optics,
                                                std::uint64_t total_counts, std::uint64_t seed) {
  return run_virtual_experiment(spec, optics, total_counts, total_counts, seed);
}

}  // namespace eprcrit
