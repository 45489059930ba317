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

#include "eprcrit/entropy.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace eprcrit;

namespace {
const double kHalfLog2PiE = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
}

TEST(entropy, discrete) {
  std::vector<double> uniform(8, 0.125);
  ASSERT_NEAR(discrete_entropy(uniform), std::log(8.0), 1e-15);
  std::vector<double> point{0.0, 1.0, 0.0};
  ASSERT_EQ(discrete_entropy(point), 0.0);
  std::vector<double> two{0.25, 0.75};
  ASSERT_NEAR(discrete_entropy(two), -(0.25 * std::log(0.25) + 0.75 * std::log(0.75)), 1e-15);
}

TEST(entropy, differential_conversion) {
  ASSERT_NEAR(differential_from_discrete(1.0, 0.5), 1.0 + std::log(0.5), 1e-15);
  ASSERT_NEAR(differential_from_discrete(1.0, 0.5, 2.0), 1.0, 1e-15);
  ASSERT_THROW(differential_from_discrete(1.0, 0.0), Error);
  ASSERT_NEAR(scale_entropy(1.0, std::numbers::e, 2), 3.0, 1e-15);
  ASSERT_THROW(scale_entropy(1.0, 2.0, 3), Error);

  // Uniform density on [0, 4): h = ln 4 for any bin width.
  for (std::size_t n : {4, 16, 64}) {
    Marginal m(Axis(0.0, 4.0 / n, n), std::vector<double>(n, 1.0 / n));
    ASSERT_NEAR(differential_entropy(m), std::log(4.0), 1e-14);
  }
}

TEST(entropy, binned_gaussian) {
  for (double sigma : {0.5, 1.0, 3.0}) {
    auto m = eprcrit::testing::binned(Axis::centered(0.05 * sigma, 401),
                                      [&](double x) { return std::exp(-x * x / (2 * sigma * sigma)); });
    ASSERT_NEAR(differential_entropy(m), kHalfLog2PiE + std::log(sigma), 1e-3);
    ASSERT_NEAR(differential_entropy(rescale(m, 2.0, Unit::length)),
                scale_entropy(differential_entropy(m), 2.0, 1), 1e-12);
  }
}

TEST(entropy, correlated_gaussian_conditionals) {
  for (double rho : {0.0, 0.5, 0.9}) {
    auto d = eprcrit::testing::correlated_gaussian(rho, 0.02, 601);
    const double v = 1.0 - rho * rho;
    for (auto p : {Party::A, Party::B}) {
      ASSERT_NEAR(inferred_variance(d, p), v, 1e-6);
      ASSERT_NEAR(conditional_entropy_chain(d, p), kHalfLog2PiE + 0.5 * std::log(v), 1e-4);
      ASSERT_NEAR(conditional_entropy_direct(d, p), conditional_entropy_chain(d, p), 1e-10);
    }
    ASSERT_NEAR(differential_joint_entropy(d), 2 * kHalfLog2PiE + 0.5 * std::log(v), 1e-4);
  }
}

TEST(entropy, chain_rule_matches_direct_average) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    auto d = eprcrit::testing::random_distribution(rng, 16, 16, k % 2 ? 0.2 : 0.0);
    for (auto p : {Party::A, Party::B}) {
      ASSERT_NEAR(conditional_entropy_direct(d, p), conditional_entropy_chain(d, p), 1e-9);
      ASSERT_LE(inferred_variance(d, p), variance(marginal(d, p)) + 1e-12);
      // Conditioning never increases entropy.
      ASSERT_LE(conditional_entropy_chain(d, p), differential_entropy(marginal(d, p)) + 1e-12);
    }
  }
}

TEST(entropy, independent_inference_gains_nothing) {
  Matrix<double> m(5, 7);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 7; ++j) m(i, j) = (i + 1.0) * (j + 2.0);
  }
  auto d = normalize(m, Axis(0, 1, 5), Axis(0, 1, 7));
  ASSERT_NEAR(inferred_variance(d, Party::A), variance(marginal(d, Party::A)), 1e-14);
  ASSERT_NEAR(conditional_entropy_chain(d, Party::A), differential_entropy(marginal(d, Party::A)), 1e-14);
}

TEST(entropy, discretization_check) {
  auto fine = eprcrit::testing::correlated_gaussian(0.5, 0.05, 241);
  ASSERT_TRUE(check_discretization(fine, Party::A).ok);
  ASSERT_NEAR(check_discretization(fine, Party::A).narrowest_sigma, std::sqrt(0.75), 1e-3);
  auto coarse = eprcrit::testing::correlated_gaussian(0.99, 0.2, 61);
  ASSERT_FALSE(check_discretization(coarse, Party::A).ok);
}
