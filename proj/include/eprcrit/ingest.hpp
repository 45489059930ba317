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

// From coincidence-count tables to criterion reports with Poissonian error
// bars.
//
// Two uncertainty estimators are provided. The analytic one propagates
// Var(C_ij) = C_ij to first order through closed-form gradients of each
// estimator with respect to the counts; empty cells are inert. The bootstrap
// redraws every cell from Poisson(C_ij) and reports the sample standard
// deviation of the recomputed value.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "eprcrit/count_table.hpp"
#include "eprcrit/criteria.hpp"
#include "eprcrit/entropy.hpp"
#include "eprcrit/error.hpp"
#include "eprcrit/grid_prob.hpp"

namespace eprcrit {

/// Magnification of a two-lens imaging system: f2 / f1.
inline double imaging_scale(double f1_mm, double f2_mm) { return f2_mm / f1_mm; }

/// Detector position to transverse wave vector in the focal plane of a lens:
/// 2 pi / (f lambda), in 1/mm per mm.
inline double fourier_scale(double focal_mm, double wavelength_mm) {
  return 2.0 * std::numbers::pi / (focal_mm * wavelength_mm);
}

/// Normalized distribution on physical axes (detector axes times gamma).
struct PhysicalDistribution {
  JointDistribution dist;
  double step = 0.0;  // gamma * detector step
};

inline PhysicalDistribution to_physical_distribution(const Matrix<double>& rates, const TableGeometry& g) {
  const Axis a(g.offset_a, g.step_mm, rates.rows(), Unit::length);
  const Axis b(g.offset_b, g.step_mm, rates.cols(), Unit::length);
  detail::check_gamma(g.gamma);
  const Unit unit = g.physical_unit();
  return {normalize(rates, a.scaled(g.gamma, unit), b.scaled(g.gamma, unit)), g.gamma * g.step_mm};
}

inline PhysicalDistribution to_physical_distribution(const CountTable& t) {
  if (!t.usable()) throw Error(ErrorCode::ZeroTotalCounts, "count table has no counts");
  detail::check_gamma(t.geometry.gamma);
  const Unit unit = t.geometry.physical_unit();
  return {normalize(t.counts, t.detector_axis_a().scaled(t.geometry.gamma, unit),
                    t.detector_axis_b().scaled(t.geometry.gamma, unit)),
          t.geometry.gamma * t.geometry.step_mm};
}

struct UncertaintyConfig {
  UncertaintyMethod method = UncertaintyMethod::analytic_first_order;
  std::size_t bootstrap_samples = 1000;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_pair(const CountTable& x, const CountTable& p) {
  if (x.geometry.variable != Variable::x || p.geometry.variable != Variable::p) {
    throw Error(ErrorCode::InvalidArgument, "expected one x table and one p table");
  }
  if (!x.usable() || !p.usable()) throw Error(ErrorCode::ZeroTotalCounts, "count table has no counts");
}

inline double count_at(const Matrix<std::int64_t>& c, Party given, std::size_t k, std::size_t j) {
  return static_cast<double>(given == Party::A ? c(j, k) : c(k, j));
}

// First-order Poisson variances of the plug-in estimators, computed from
// the raw counts. With N the total and p = C/N:
//   dH(infer|given)/dC_kj = (-ln(p_kj / q_j) - H(infer|given)) / N
//   dH(marginal)/dC       = (-ln r_k - H) / N
//   dH(joint)/dC          = (-ln p_kj - H) / N
//   dD/dC_kj              = ((x_k - m_j)^2 - D) / N   (inferred variance)
// and Var = sum C g^2. Step and gamma terms are constants and drop out.

inline double conditional_entropy_variance(const Matrix<std::int64_t>& c, Party infer) {
  const Party given = other(infer);
  const std::size_t n_given = given == Party::A ? c.rows() : c.cols();
  const std::size_t n_infer = given == Party::A ? c.cols() : c.rows();
  double total = 0.0;
  for (const auto v : c.flat()) total += static_cast<double>(v);
  std::vector<double> q(n_given, 0.0);
  double h = 0.0;
  for (std::size_t j = 0; j < n_given; ++j) {
    for (std::size_t k = 0; k < n_infer; ++k) q[j] += count_at(c, given, k, j);
    for (std::size_t k = 0; k < n_infer; ++k) {
      const double ckj = count_at(c, given, k, j);
      if (ckj > 0.0) h -= ckj / total * std::log(ckj / q[j]);
    }
  }
  double var = 0.0;
  for (std::size_t j = 0; j < n_given; ++j) {
    for (std::size_t k = 0; k < n_infer; ++k) {
      const double ckj = count_at(c, given, k, j);
      if (!(ckj > 0.0)) continue;
      const double g = (-std::log(ckj / q[j]) - h) / total;
      var += ckj * g * g;
    }
  }
  return var;
}

inline double marginal_entropy_variance(const Matrix<std::int64_t>& c, Party party) {
  const std::size_t n = party == Party::A ? c.rows() : c.cols();
  std::vector<double> r(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      const auto v = static_cast<double>(c(i, j));
      r[party == Party::A ? i : j] += v;
      total += v;
    }
  }
  double h = 0.0;
  for (const double rk : r) {
    if (rk > 0.0) h -= rk / total * std::log(rk / total);
  }
  double var = 0.0;
  for (const double rk : r) {
    if (!(rk > 0.0)) continue;
    const double g = (-std::log(rk / total) - h) / total;
    var += rk * g * g;  // every cell in a marginal bin shares the same gradient
  }
  return var;
}

inline double joint_entropy_variance(const Matrix<std::int64_t>& c) {
  double total = 0.0;
  for (const auto v : c.flat()) total += static_cast<double>(v);
  double h = 0.0;
  for (const auto v : c.flat()) {
    if (v > 0) h -= static_cast<double>(v) / total * std::log(static_cast<double>(v) / total);
  }
  double var = 0.0;
  for (const auto v : c.flat()) {
    if (v <= 0) continue;
    const double g = (-std::log(static_cast<double>(v) / total) - h) / total;
    var += static_cast<double>(v) * g * g;
  }
  return var;
}

inline double inferred_variance_variance(const Matrix<std::int64_t>& c, const Axis& inferred_axis, Party infer) {
  const Party given = other(infer);
  const std::size_t n_given = given == Party::A ? c.rows() : c.cols();
  const std::size_t n_infer = inferred_axis.count();
  double total = 0.0;
  for (const auto v : c.flat()) total += static_cast<double>(v);
  std::vector<double> means(n_given, 0.0);
  double d = 0.0;
  for (std::size_t j = 0; j < n_given; ++j) {
    double w = 0.0, first = 0.0;
    for (std::size_t k = 0; k < n_infer; ++k) {
      const double ckj = count_at(c, given, k, j);
      w += ckj;
      first += ckj * inferred_axis.position(k);
    }
    if (!(w > 0.0)) continue;
    means[j] = first / w;
    for (std::size_t k = 0; k < n_infer; ++k) {
      const double dev = inferred_axis.position(k) - means[j];
      d += count_at(c, given, k, j) * dev * dev;
    }
  }
  d /= total;
  double var = 0.0;
  for (std::size_t j = 0; j < n_given; ++j) {
    for (std::size_t k = 0; k < n_infer; ++k) {
      const double ckj = count_at(c, given, k, j);
      if (!(ckj > 0.0)) continue;
      const double dev = inferred_axis.position(k) - means[j];
      const double g = (dev * dev - d) / total;
      var += ckj * g * g;
    }
  }
  return var;
}

inline double criterion_value(const JointDistribution& dx, const JointDistribution& dp, CriterionKind kind,
                              Direction direction) {
  if (kind == CriterionKind::variance_epr) return variance_epr(dx, dp, direction).value;
  return entropic_epr(dx, dp, direction).value;
}

inline CountTable poisson_resample(const CountTable& t, std::mt19937_64& engine) {
  CountTable out{t.geometry, Matrix<std::int64_t>(t.counts.rows(), t.counts.cols())};
  auto src = t.counts.flat();
  auto dst = out.counts.flat();
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (src[k] > 0) {
      std::poisson_distribution<std::int64_t> draw(static_cast<double>(src[k]));
      dst[k] = draw(engine);
    }
  }
  return out;
}

inline std::mt19937_64 replica_engine(std::uint64_t seed, std::uint64_t replica) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Variance or entropic EPR report computed from an x table and a p table,
/// with an uncertainty from the configured method.
inline CriterionReport criterion_with_uncertainty(const CountTable& table_x, const CountTable& table_p,
                                                  CriterionKind kind, Direction direction,
                                                  const UncertaintyConfig& cfg = {}) {
  if (kind != CriterionKind::variance_epr && kind != CriterionKind::entropic_epr) {
    throw Error(ErrorCode::InvalidArgument, "only the EPR criteria are computed from count tables");
  }
  detail::check_pair(table_x, table_p);
  const Party infer = inferred_party(direction);
  const PhysicalDistribution px = to_physical_distribution(table_x);
  const PhysicalDistribution pp = to_physical_distribution(table_p);
  CriterionReport report = kind == CriterionKind::variance_epr ? variance_epr(px.dist, pp.dist, direction)
                                                               : entropic_epr(px.dist, pp.dist, direction);

  double sigma = 0.0;
  if (cfg.method == UncertaintyMethod::analytic_first_order) {
    if (kind == CriterionKind::entropic_epr) {
      sigma = std::sqrt(detail::conditional_entropy_variance(table_x.counts, infer) +
                        detail::conditional_entropy_variance(table_p.counts, infer));
    } else {
      const double dx = inferred_variance(px.dist, infer);
      const double dp = inferred_variance(pp.dist, infer);
      const double vx = detail::inferred_variance_variance(table_x.counts, px.dist.axis(infer), infer);
      const double vp = detail::inferred_variance_variance(table_p.counts, pp.dist.axis(infer), infer);
      sigma = std::sqrt(dp * dp * vx + dx * dx * vp);
    }
  } else {
    if (cfg.bootstrap_samples < 100) {
      throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least 100 samples");
    }
    // Replica r draws from its own stream, so the result does not depend on
    // evaluation order.
    std::vector<double> values;
    values.reserve(cfg.bootstrap_samples);
    for (std::size_t r = 0; r < cfg.bootstrap_samples; ++r) {
      auto engine = detail::replica_engine(cfg.seed, r);
      const CountTable bx = detail::poisson_resample(table_x, engine);
      const CountTable bp = detail::poisson_resample(table_p, engine);
      if (!bx.usable() || !bp.usable()) continue;
      values.push_back(detail::criterion_value(to_physical_distribution(bx).dist, to_physical_distribution(bp).dist,
                                               kind, direction));
    }
    if (values.size() < 2) throw Error(ErrorCode::ZeroTotalCounts, "bootstrap replicas were empty");
    double m = 0.0;
    for (const double v : values) m += v;
    m /= static_cast<double>(values.size());
    double ss = 0.0;
    for (const double v : values) ss += (v - m) * (v - m);
    sigma = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return with_uncertainty(report, sigma, cfg.method);
}

/// Differential entropies of the physical variables with first-order
/// Poisson uncertainties, in nats.
struct EntropyBreakdown {
  EntropyValue x_a, x_b, x_ab;
  EntropyValue p_a, p_b, p_ab;
  EntropyValue x_a_given_b, x_b_given_a;
  EntropyValue p_a_given_b, p_b_given_a;
};

inline EntropyBreakdown entropy_breakdown(const CountTable& table_x, const CountTable& table_p) {
  detail::check_pair(table_x, table_p);
  const PhysicalDistribution px = to_physical_distribution(table_x);
  const PhysicalDistribution pp = to_physical_distribution(table_p);
  auto single = [](const PhysicalDistribution& d, const CountTable& t, Party party) {
    return EntropyValue{differential_entropy(marginal(d.dist, party)),
                        std::sqrt(detail::marginal_entropy_variance(t.counts, party))};
  };
  auto joint = [](const PhysicalDistribution& d, const CountTable& t) {
    return EntropyValue{differential_joint_entropy(d.dist), std::sqrt(detail::joint_entropy_variance(t.counts))};
  };
  auto cond = [](const PhysicalDistribution& d, const CountTable& t, Party infer) {
    return EntropyValue{conditional_entropy_chain(d.dist, infer),
                        std::sqrt(detail::conditional_entropy_variance(t.counts, infer))};
  };
  EntropyBreakdown b;
  b.x_a = single(px, table_x, Party::A);
  b.x_b = single(px, table_x, Party::B);
  b.x_ab = joint(px, table_x);
  b.p_a = single(pp, table_p, Party::A);
  b.p_b = single(pp, table_p, Party::B);
  b.p_ab = joint(pp, table_p);
  b.x_a_given_b = cond(px, table_x, Party::A);
  b.x_b_given_a = cond(px, table_x, Party::B);
  b.p_a_given_b = cond(pp, table_p, Party::A);
  b.p_b_given_a = cond(pp, table_p, Party::B);
  return b;
}

}  // namespace eprcrit
