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

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include "eprcrit/grid_prob.hpp"
#include "eprcrit/matrix.hpp"

namespace eprcrit::testing {

/// Random strictly positive joint distribution on unit-spaced axes.
inline JointDistribution random_distribution(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                             double zero_fraction = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix<double> m(rows, cols);
  for (auto& v : m.flat()) v = u(rng) < zero_fraction ? 0.0 : u(rng) + 1e-3;
  return normalize(m, Axis(0.0, 1.0, rows), Axis(0.0, 1.0, cols));
}

/// Midpoint-rule histogram of a 1D density on `axis`, normalized.
inline Marginal binned(const Axis& axis, const std::function<double(double)>& density) {
  std::vector<double> mass(axis.count());
  double total = 0.0;
  for (std::size_t i = 0; i < axis.count(); ++i) total += mass[i] = density(axis.position(i));
  for (auto& v : mass) v /= total;
  return Marginal(axis, std::move(mass));
}

/// Bivariate Gaussian with unit marginal variances and correlation rho.
inline JointDistribution correlated_gaussian(double rho, double step, std::size_t count) {
  const Axis axis = Axis::centered(step, count, Unit::length);
  Matrix<double> m(count, count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      const double a = axis.position(i);
      const double b = axis.position(j);
      m(i, j) = std::exp(-(a * a - 2.0 * rho * a * b + b * b) / (2.0 * (1.0 - rho * rho)));
    }
  }
  return normalize(m, axis, axis);
}

}  // namespace eprcrit::testing
