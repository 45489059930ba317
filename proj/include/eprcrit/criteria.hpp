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

// EPR inequalities, single-party uncertainty relations and the
// continuous-variable key-rate bound.
//
// Conventions: [X, P] = i, so the variance bound is 1/4 and the entropic
// bound is ln(pi e). A criterion is violated only on strict inequality
// value < bound; saturation, up to a relative 1e-9 for rounding, counts as
// satisfied.

#pragma once

#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <utility>

#include "eprcrit/entropy.hpp"
#include "eprcrit/grid_prob.hpp"

namespace eprcrit {

/// ln(pi e) = 1 + ln(pi), at full precision.
inline const double kLnPiE = 1.0 + std::log(std::numbers::pi);
inline constexpr double kVarianceBound = 0.25;

enum class CriterionKind { variance_epr, entropic_epr, heisenberg, entropic_ur, keyrate };
enum class Direction { a_given_b, b_given_a, single_party };
enum class UncertaintyMethod { analytic_first_order, bootstrap };

inline std::string_view to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::variance_epr: return "variance_epr";
    case CriterionKind::entropic_epr: return "entropic_epr";
    case CriterionKind::heisenberg: return "heisenberg";
    case CriterionKind::entropic_ur: return "entropic_ur";
    case CriterionKind::keyrate: return "keyrate";
  }
  return "?";
}

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::a_given_b: return "A|B";
    case Direction::b_given_a: return "B|A";
    case Direction::single_party: return "single";
  }
  return "?";
}

inline std::string_view to_string(UncertaintyMethod m) {
  return m == UncertaintyMethod::bootstrap ? "bootstrap" : "analytic";
}

/// Party whose value is inferred in the given direction.
inline Party inferred_party(Direction d) {
  if (d == Direction::single_party) {
    throw Error(ErrorCode::InvalidArgument, "EPR criteria need an inference direction");
  }
  return d == Direction::a_given_b ? Party::A : Party::B;
}

struct CriterionReport {
  CriterionKind kind = CriterionKind::variance_epr;
  Direction direction = Direction::single_party;
  double value = 0.0;
  double bound = 0.0;
  bool violated = false;
  std::optional<double> uncertainty;
  std::optional<double> significance_sigmas;
  std::optional<UncertaintyMethod> method;
};

inline double bound_for(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::variance_epr:
    case CriterionKind::heisenberg:
      return kVarianceBound;
    case CriterionKind::entropic_epr:
    case CriterionKind::entropic_ur:
      return kLnPiE;
    case CriterionKind::keyrate:
      return 0.0;
  }
  return 0.0;
}

/// Values within this relative distance of a nonzero bound are treated as
/// saturating it, so last-bit rounding on an exactly saturating grid state
/// does not read as a violation.
inline constexpr double kSaturationTolerance = 1e-9;

inline CriterionReport make_report(CriterionKind kind, Direction direction, double value) {
  CriterionReport r;
  r.kind = kind;
  r.direction = direction;
  r.value = value;
  r.bound = bound_for(kind);
  // A key rate is "violated" in the sense that a positive bound certifies a key.
  r.violated = kind == CriterionKind::keyrate ? value > r.bound
                                              : value < r.bound * (1.0 - kSaturationTolerance);
  return r;
}

/// Attaches an uncertainty; significance = (bound - value) / uncertainty.
inline CriterionReport with_uncertainty(CriterionReport r, double sigma, UncertaintyMethod method) {
  r.uncertainty = sigma;
  r.method = method;
  if (sigma > 0.0) r.significance_sigmas = (r.bound - r.value) / sigma;
  return r;
}

/// Delta^2_min(X) * Delta^2_min(P) for the inferred party.
inline CriterionReport variance_epr(const JointDistribution& dist_x, const JointDistribution& dist_p,
                                    Direction direction) {
  const Party infer = inferred_party(direction);
  return make_report(CriterionKind::variance_epr, direction,
                     inferred_variance(dist_x, infer) * inferred_variance(dist_p, infer));
}

/// h(X_i|X_j) + h(P_i|P_j).
inline CriterionReport entropic_epr(const JointDistribution& dist_x, const JointDistribution& dist_p,
                                    Direction direction) {
  const Party infer = inferred_party(direction);
  return make_report(CriterionKind::entropic_epr, direction,
                     conditional_entropy_chain(dist_x, infer) + conditional_entropy_chain(dist_p, infer));
}

inline CriterionReport heisenberg_check(const Marginal& marg_x, const Marginal& marg_p) {
  return make_report(CriterionKind::heisenberg, Direction::single_party, variance(marg_x) * variance(marg_p));
}

inline CriterionReport entropic_ur_check(const Marginal& marg_x, const Marginal& marg_p) {
  return make_report(CriterionKind::entropic_ur, Direction::single_party,
                     differential_entropy(marg_x) + differential_entropy(marg_p));
}

/// Secret-key-rate lower bound ln(pi e) - [h(X_B|X_A) + h(P_B|P_A)].
inline double keyrate_lower_bound(double entropic_sum_b_given_a) { return kLnPiE - entropic_sum_b_given_a; }

/// The key verdict is taken from the entropic sum itself, so it agrees
/// exactly with the B|A entropic EPR verdict.
inline CriterionReport keyrate_report(double entropic_sum_b_given_a) {
  CriterionReport r =
      make_report(CriterionKind::keyrate, Direction::b_given_a, keyrate_lower_bound(entropic_sum_b_given_a));
  r.violated = make_report(CriterionKind::entropic_epr, Direction::b_given_a, entropic_sum_b_given_a).violated;
  return r;
}

/// Both inference directions, A|B first.
inline std::array<CriterionReport, 2> variance_epr_both(const JointDistribution& dx, const JointDistribution& dp) {
  return {variance_epr(dx, dp, Direction::a_given_b), variance_epr(dx, dp, Direction::b_given_a)};
}

inline std::array<CriterionReport, 2> entropic_epr_both(const JointDistribution& dx, const JointDistribution& dp) {
  return {entropic_epr(dx, dp, Direction::a_given_b), entropic_epr(dx, dp, Direction::b_given_a)};
}

/// Details of the Gaussian-maximality ordering between the two criteria.
///
/// A histogram with bin width s is a piecewise-constant density whose
/// differential entropy is H + ln s and whose variance is the discrete
/// variance plus s^2/12. Gaussian maximality is exact for that density, so
/// the per-slice test uses the s^2/12-corrected variance.
struct BoundConsistency {
  bool per_slice = true;
  double worst_slice_gap = 0.0;  // min over slices of 0.5 ln(2 pi e var) - h, >= -slack when ok
  double entropic_sum = 0.0;
  double variance_image = 0.0;  // ln(2 pi e sqrt(Dx^2 Dp^2)) with histogram-corrected variances
  bool aggregate = true;
  bool ok() const { return per_slice && aggregate; }
};

namespace detail {

inline double gaussian_entropy(double var) { return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * var); }

// Returns min over nonzero-weight slices of [0.5 ln(2 pi e (var + s^2/12)) - h_slice]
// and the histogram-corrected inferred variance.
inline std::pair<double, double> slice_gaps(const JointDistribution& dist, Party infer) {
  const Party given = other(infer);
  const Marginal weights = marginal(dist, given);
  const double s = dist.axis(infer).step();
  const double sheppard = s * s / 12.0;
  double worst = std::numeric_limits<double>::infinity();
  double inferred = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!(weights[j] > 0.0)) continue;
    const auto slice = conditional_slice(dist, given, j);
    if (!slice) continue;
    const double var = variance(*slice) + sheppard;
    worst = std::min(worst, gaussian_entropy(var) - differential_entropy(*slice));
    inferred += weights[j] * var;
  }
  return {worst, inferred};
}

}  // namespace detail

inline BoundConsistency bound_consistency_details(const JointDistribution& dist_x, const JointDistribution& dist_p,
                                                  Direction direction, double slack = 0.02) {
  const Party infer = inferred_party(direction);
  const auto [gap_x, var_x] = detail::slice_gaps(dist_x, infer);
  const auto [gap_p, var_p] = detail::slice_gaps(dist_p, infer);
  BoundConsistency out;
  out.worst_slice_gap = std::min(gap_x, gap_p);
  out.per_slice = out.worst_slice_gap >= -slack;
  out.entropic_sum = entropic_epr(dist_x, dist_p, direction).value;
  out.variance_image = std::log(2.0 * std::numbers::pi * std::numbers::e * std::sqrt(var_x * var_p));
  out.aggregate = out.entropic_sum <= out.variance_image + slack;
  return out;
}

/// True when the entropic sum sits below the entropic image of the inferred
/// variances, slice by slice and in aggregate.
inline bool bound_consistency(const JointDistribution& dist_x, const JointDistribution& dist_p, Direction direction,
                              double slack = 0.02) {
  return bound_consistency_details(dist_x, dist_p, direction, slack).ok();
}

}  // namespace eprcrit
