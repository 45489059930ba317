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

// Shannon entropies of grid distributions and inferred variances.
//
// All entropies are in nats. A grid distribution with bin width s is read as
// a piecewise-constant density, so its differential entropy is the discrete
// entropy plus ln(s) per dimension. Differential entropies may be negative.
//
// Conditional entropy uses the standard sign convention
//   h(A|B) = sum_b P(b) h(A|B=b) = h(A,B) - h(B),
// which is what the chain rule requires.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eprcrit/error.hpp"
#include "eprcrit/grid_prob.hpp"

namespace eprcrit {

struct EntropyValue {
  double value = 0.0;
  std::optional<double> uncertainty;
};

namespace detail {

// -p ln p with 0 ln 0 = 0.
inline double plogp_term(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

inline void check_step(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::NonPositiveStep, "step must be positive, got " + std::to_string(step));
  }
}

}  // namespace detail

inline double discrete_entropy(std::span<const double> mass) {
  double h = 0.0;
  for (const double p : mass) h += detail::plogp_term(p);
  return h;
}

inline double discrete_entropy(const Marginal& m) { return discrete_entropy(m.mass()); }

inline double discrete_joint_entropy(const JointDistribution& dist) { return discrete_entropy(dist.mass().flat()); }

/// h ~ H + ln(step).
inline double differential_from_discrete(double discrete, double step) {
  detail::check_step(step);
  return discrete + std::log(step);
}

/// h ~ H + ln(step_a * step_b).
inline double differential_from_discrete(double discrete, double step_a, double step_b) {
  detail::check_step(step_a);
  detail::check_step(step_b);
  return discrete + std::log(step_a) + std::log(step_b);
}

/// Entropy of a variable after multiplying it by gamma: h + arity * ln(gamma).
inline double scale_entropy(double h, double gamma, int arity) {
  detail::check_gamma(gamma);
  if (arity != 1 && arity != 2) {
    throw Error(ErrorCode::InvalidArgument, "arity must be 1 or 2");
  }
  return h + arity * std::log(gamma);
}

inline double differential_entropy(const Marginal& m) {
  return differential_from_discrete(discrete_entropy(m), m.axis().step());
}

inline double differential_joint_entropy(const JointDistribution& d) {
  return differential_from_discrete(discrete_joint_entropy(d), d.axis_a().step(), d.axis_b().step());
}

/// h(infer | other) via h(A,B) - h(other).
inline double conditional_entropy_chain(const JointDistribution& dist, Party infer) {
  return differential_joint_entropy(dist) - differential_entropy(marginal(dist, other(infer)));
}

/// h(infer | other) as the P(other)-weighted average of slice entropies.
/// Slices with zero weight are skipped.
inline double conditional_entropy_direct(const JointDistribution& dist, Party infer) {
  const Party given = other(infer);
  const Marginal weights = marginal(dist, given);
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!(weights[j] > 0.0)) continue;
    const auto slice = conditional_slice(dist, given, j);
    if (!slice) continue;
    acc += weights[j] * differential_entropy(*slice);
  }
  return acc;
}

/// Minimum inference variance: sum_j P(other_j) Var(infer | other_j).
inline double inferred_variance(const JointDistribution& dist, Party infer) {
  const Party given = other(infer);
  const auto& m = dist.mass();
  const Axis& inferred_axis = dist.axis(infer);
  const std::size_t n_given = given == Party::A ? m.rows() : m.cols();
  const std::size_t n_infer = inferred_axis.count();
  auto cell = [&](std::size_t k, std::size_t j) { return given == Party::A ? m(j, k) : m(k, j); };

  double total = 0.0;
  for (std::size_t j = 0; j < n_given; ++j) {
    double w = 0.0;
    double first = 0.0;
    for (std::size_t k = 0; k < n_infer; ++k) {
      const double p = cell(k, j);
      w += p;
      first += p * inferred_axis.position(k);
    }
    if (!(w > 0.0)) continue;
    const double mu = first / w;
    double second = 0.0;
    for (std::size_t k = 0; k < n_infer; ++k) {
      const double d = inferred_axis.position(k) - mu;
      second += cell(k, j) * d * d;
    }
    total += second;  // = w * Var(slice j)
  }
  return total;
}

/// Resolution diagnostic for the first-order entropy conversion.
struct DiscretizationCheck {
  double step = 0.0;
  double narrowest_sigma = 0.0;  // smallest std among significant conditional slices
  bool ok = true;                // step <= narrowest_sigma / 3
};

/// Looks at conditional slices carrying at least `weight_floor` of the
/// largest slice weight; point-mass slices report sigma 0.
inline DiscretizationCheck check_discretization(const JointDistribution& dist, Party infer,
                                                double weight_floor = 1e-3) {
  const Party given = other(infer);
  const Marginal weights = marginal(dist, given);
  const double wmax = *std::max_element(weights.mass().begin(), weights.mass().end());
  DiscretizationCheck out;
  out.step = dist.axis(infer).step();
  out.narrowest_sigma = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] < weight_floor * wmax) continue;
    const auto slice = conditional_slice(dist, given, j);
    if (!slice) continue;
    out.narrowest_sigma = std::min(out.narrowest_sigma, std::sqrt(variance(*slice)));
  }
  out.ok = out.step <= out.narrowest_sigma / 3.0;
  return out;
}

}  // namespace eprcrit
