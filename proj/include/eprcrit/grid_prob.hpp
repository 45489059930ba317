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

// Uniform sampling grids and normalized probability tables over them.
//
// Everything here is an immutable value: distributions are normalized when
// they are built and every operation returns a new object.

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "eprcrit/error.hpp"
#include "eprcrit/matrix.hpp"

namespace eprcrit {

/// Compensated (Neumaier) summation.
template <typename Range>
double accurate_sum(const Range& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (const auto v : values) {
    const double x = static_cast<double>(v);
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

enum class Unit { length, inverse_length, dimensionless };

inline std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::length: return "mm";
    case Unit::inverse_length: return "1/mm";
    case Unit::dimensionless: return "1";
  }
  return "?";
}

enum class Party { A, B };

inline Party other(Party p) { return p == Party::A ? Party::B : Party::A; }

/// Uniform 1D grid: position(i) = offset + i * step for i in [0, count).
class Axis {
 public:
  Axis(double offset, double step, std::size_t count, Unit unit = Unit::dimensionless)
      : offset_(offset), step_(step), count_(count), unit_(unit) {
    if (!(step > 0.0) || !std::isfinite(step)) {
      throw Error(ErrorCode::NonPositiveStep, "axis step must be positive, got " + std::to_string(step));
    }
    if (count < 2) {
      throw Error(ErrorCode::InvalidAxis, "axis needs at least 2 points");
    }
    if (!std::isfinite(offset)) {
      throw Error(ErrorCode::InvalidAxis, "axis offset must be finite");
    }
  }

  /// Axis of `count` points centred on zero (the middle point sits at 0 for odd counts).
  static Axis centered(double step, std::size_t count, Unit unit = Unit::dimensionless) {
    return Axis(-0.5 * static_cast<double>(count - 1) * step, step, count, unit);
  }

  double offset() const noexcept { return offset_; }
  double step() const noexcept { return step_; }
  std::size_t count() const noexcept { return count_; }
  Unit unit() const noexcept { return unit_; }

  double position(std::size_t i) const noexcept { return offset_ + static_cast<double>(i) * step_; }
  double first() const noexcept { return offset_; }
  double last() const noexcept { return position(count_ - 1); }

  std::vector<double> positions() const {
    std::vector<double> out(count_);
    for (std::size_t i = 0; i < count_; ++i) out[i] = position(i);
    return out;
  }

  Axis scaled(double gamma, Unit unit) const { return Axis(offset_ * gamma, step_ * gamma, count_, unit); }

  friend bool operator==(const Axis&, const Axis&) = default;

 private:
  double offset_;
  double step_;
  std::size_t count_;
  Unit unit_;
};

namespace detail {

inline constexpr double kConstructionTolerance = 1e-12;

// Checks entries are finite and nonnegative and the total is within
// kConstructionTolerance of one, then divides by the accurate total so the
// stored mass sums to one to rounding.
inline void renormalize_in_place(std::span<double> mass) {
  for (const double v : mass) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NegativeMass, "probability entries must be finite and nonnegative");
    }
  }
  const double total = accurate_sum(mass);
  if (std::abs(total - 1.0) > kConstructionTolerance) {
    throw Error(ErrorCode::NotNormalized, "mass sums to " + std::to_string(total));
  }
  for (double& v : mass) v /= total;
}

}  // namespace detail

/// Normalized 1D probability mass over an Axis.
class Marginal {
 public:
  Marginal(Axis axis, std::vector<double> mass) : axis_(axis), mass_(std::move(mass)) {
    if (mass_.size() != axis_.count()) {
      throw Error(ErrorCode::ShapeMismatch, "marginal mass length does not match axis");
    }
    detail::renormalize_in_place(mass_);
  }

  const Axis& axis() const noexcept { return axis_; }
  std::span<const double> mass() const noexcept { return mass_; }
  double operator[](std::size_t i) const { return mass_[i]; }
  std::size_t size() const noexcept { return mass_.size(); }

 private:
  Axis axis_;
  std::vector<double> mass_;
};

/// Normalized 2D probability mass; rows index axis_a, columns axis_b.
class JointDistribution {
 public:
  JointDistribution(Axis axis_a, Axis axis_b, Matrix<double> mass)
      : axis_a_(axis_a), axis_b_(axis_b), mass_(std::move(mass)) {
    if (mass_.rows() != axis_a_.count() || mass_.cols() != axis_b_.count()) {
      throw Error(ErrorCode::ShapeMismatch, "joint mass shape does not match axes");
    }
    detail::renormalize_in_place(mass_.flat());
  }

  const Axis& axis_a() const noexcept { return axis_a_; }
  const Axis& axis_b() const noexcept { return axis_b_; }
  const Axis& axis(Party p) const noexcept { return p == Party::A ? axis_a_ : axis_b_; }
  const Matrix<double>& mass() const noexcept { return mass_; }
  double operator()(std::size_t i, std::size_t j) const { return mass_(i, j); }

 private:
  Axis axis_a_;
  Axis axis_b_;
  Matrix<double> mass_;
};

/// counts[i][j] / total. Accepts any arithmetic cell type (raw counts or rates).
template <typename T>
  requires std::is_arithmetic_v<T>
JointDistribution normalize(const Matrix<T>& counts, const Axis& axis_a, const Axis& axis_b) {
  if (counts.rows() != axis_a.count() || counts.cols() != axis_b.count()) {
    throw Error(ErrorCode::ShapeMismatch, "count matrix is " + std::to_string(counts.rows()) + "x" +
                                              std::to_string(counts.cols()) + ", axes are " +
                                              std::to_string(axis_a.count()) + "x" +
                                              std::to_string(axis_b.count()));
  }
  for (const T v : counts.flat()) {
    if (!(static_cast<double>(v) >= 0.0) || !std::isfinite(static_cast<double>(v))) {
      throw Error(ErrorCode::NegativeMass, "counts must be finite and nonnegative");
    }
  }
  const double total = accurate_sum(counts.flat());
  if (!(total > 0.0)) {
    throw Error(ErrorCode::AllZero, "every entry is zero");
  }
  Matrix<double> mass = counts.map([total](T v) { return static_cast<double>(v) / total; });
  return JointDistribution(axis_a, axis_b, std::move(mass));
}

/// Row sums (party A) or column sums (party B).
inline Marginal marginal(const JointDistribution& dist, Party party) {
  const auto& m = dist.mass();
  if (party == Party::A) {
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = accurate_sum(m.row(i));
    return Marginal(dist.axis_a(), std::move(out));
  }
  std::vector<double> out(m.cols(), 0.0);
  std::vector<double> carry(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      // Kahan per column; rows can number in the thousands.
      const double y = row[j] - carry[j];
      const double t = out[j] + y;
      carry[j] = (t - out[j]) - y;
      out[j] = t;
    }
  }
  return Marginal(dist.axis_b(), std::move(out));
}

/// Distribution of the other party conditioned on `given` taking grid value
/// `index`. Returns nullopt (undefined) when that conditioning value has zero
/// probability.
inline std::optional<Marginal> conditional_slice(const JointDistribution& dist, Party given, std::size_t index) {
  const auto& m = dist.mass();
  const std::size_t limit = given == Party::A ? m.rows() : m.cols();
  if (index >= limit) {
    throw Error(ErrorCode::IndexOutOfRange,
                "conditioning index " + std::to_string(index) + " >= " + std::to_string(limit));
  }
  std::vector<double> slice;
  if (given == Party::A) {
    const auto row = m.row(index);
    slice.assign(row.begin(), row.end());
  } else {
    slice.resize(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) slice[i] = m(i, index);
  }
  const double weight = accurate_sum(slice);
  if (!(weight > 0.0)) return std::nullopt;
  for (double& v : slice) v /= weight;
  return Marginal(dist.axis(other(given)), std::move(slice));
}

inline double mean(const Marginal& m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) acc += m[i] * m.axis().position(i);
  return acc;
}

/// Second central moment, computed about the mean so large offsets do not
/// cancel catastrophically.
inline double variance(const Marginal& m) {
  const double mu = mean(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double d = m.axis().position(i) - mu;
    acc += m[i] * d * d;
  }
  return acc;
}

namespace detail {
inline void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::NonPositiveGamma, "scale factor must be positive, got " + std::to_string(gamma));
  }
}
}  // namespace detail

inline Marginal rescale(const Marginal& m, double gamma, Unit new_unit) {
  detail::check_gamma(gamma);
  return Marginal(m.axis().scaled(gamma, new_unit), std::vector<double>(m.mass().begin(), m.mass().end()));
}

inline JointDistribution rescale(const JointDistribution& d, double gamma, Unit new_unit) {
  detail::check_gamma(gamma);
  return JointDistribution(d.axis_a().scaled(gamma, new_unit), d.axis_b().scaled(gamma, new_unit), d.mass());
}

/// Swaps the roles of A and B.
inline JointDistribution swap_parties(const JointDistribution& d) {
  return JointDistribution(d.axis_b(), d.axis_a(), d.mass().transposed());
}

}  // namespace eprcrit
