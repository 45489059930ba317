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

#include "eprcrit/grid_prob.hpp"

#include <random>

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace eprcrit;

TEST(grid_prob, accurate_sum_recovers_cancelled_terms) {
  std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  ASSERT_EQ(accurate_sum(v), 2.0);
  std::vector<int> ints{1, 2, 3};
  ASSERT_EQ(accurate_sum(ints), 6.0);
}

TEST(grid_prob, axis) {
  Axis a(-1.0, 0.5, 5, Unit::length);
  ASSERT_EQ(a.position(0), -1.0);
  ASSERT_EQ(a.last(), 1.0);
  ASSERT_EQ(a.positions(), (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
  ASSERT_EQ(Axis::centered(0.5, 5, Unit::length), a);
  Axis s = a.scaled(2.0, Unit::inverse_length);
  ASSERT_EQ(s.step(), 1.0);
  ASSERT_EQ(s.first(), -2.0);
  ASSERT_EQ(s.unit(), Unit::inverse_length);
  ASSERT_EQ(to_string(Unit::inverse_length), "1/mm");

  try {
    Axis(0.0, 0.0, 4);
    FAIL();
  } catch (const Error& e) {
    ASSERT_EQ(e.code(), ErrorCode::NonPositiveStep);
  }
  try {
    Axis(0.0, 1.0, 1);
    FAIL();
  } catch (const Error& e) {
    ASSERT_EQ(e.code(), ErrorCode::InvalidAxis);
  }
}

TEST(grid_prob, normalize_counts) {
  Matrix<int> c{{1, 3}, {0, 4}};
  auto d = normalize(c, Axis(0, 1, 2), Axis(0, 1, 2));
  ASSERT_DOUBLE_EQ(d(0, 1), 3.0 / 8.0);
  ASSERT_DOUBLE_EQ(d(1, 0), 0.0);

  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  ASSERT_EQ(code_of([] { normalize(Matrix<int>(2, 2, 0), Axis(0, 1, 2), Axis(0, 1, 2)); }), ErrorCode::AllZero);
  ASSERT_EQ(code_of([] { normalize(Matrix<int>{{1, -1}, {1, 1}}, Axis(0, 1, 2), Axis(0, 1, 2)); }),
            ErrorCode::NegativeMass);
  ASSERT_EQ(code_of([] { normalize(Matrix<int>(2, 3, 1), Axis(0, 1, 2), Axis(0, 1, 2)); }),
            ErrorCode::ShapeMismatch);
  ASSERT_EQ(code_of([] { Marginal(Axis(0, 1, 2), {0.5, 0.4}); }), ErrorCode::NotNormalized);
  ASSERT_EQ(code_of([] { Marginal(Axis(0, 1, 3), {0.5, 0.5}); }), ErrorCode::ShapeMismatch);
}

TEST(grid_prob, marginals_and_slices) {
  Matrix<double> m{{0.1, 0.2}, {0.3, 0.4}};
  JointDistribution d(Axis(0, 1, 2), Axis(10, 1, 2), m);
  auto ma = marginal(d, Party::A);
  auto mb = marginal(d, Party::B);
  ASSERT_NEAR(ma[0], 0.3, 1e-15);
  ASSERT_NEAR(mb[1], 0.6, 1e-15);
  ASSERT_EQ(mb.axis().first(), 10.0);

  auto s = conditional_slice(d, Party::B, 0);
  ASSERT_TRUE(s.has_value());
  ASSERT_NEAR((*s)[0], 0.25, 1e-15);
  ASSERT_EQ(s->axis(), d.axis_a());

  JointDistribution z(Axis(0, 1, 2), Axis(0, 1, 2), Matrix<double>{{0.5, 0.0}, {0.5, 0.0}});
  ASSERT_FALSE(conditional_slice(z, Party::B, 1).has_value());
  ASSERT_THROW(conditional_slice(z, Party::A, 2), Error);
}

TEST(grid_prob, moments) {
  Marginal m(Axis(1e6, 1.0, 3), {0.25, 0.5, 0.25});
  ASSERT_DOUBLE_EQ(mean(m), 1e6 + 1.0);
  ASSERT_NEAR(variance(m), 0.5, 1e-12);
  auto r = rescale(m, 2.0, Unit::length);
  ASSERT_NEAR(variance(r), 2.0, 1e-9);
  ASSERT_THROW(rescale(m, -1.0, Unit::length), Error);
}

TEST(grid_prob, marginal_of_random_distribution_sums_to_one) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    auto d = eprcrit::testing::random_distribution(rng, 7, 11, 0.3);
    for (auto p : {Party::A, Party::B}) {
      ASSERT_NEAR(accurate_sum(marginal(d, p).mass()), 1.0, 1e-14);
    }
    auto s = swap_parties(d);
    ASSERT_EQ(s.axis_a(), d.axis_b());
    ASSERT_EQ(s(3, 2), d(2, 3));
  }
}
