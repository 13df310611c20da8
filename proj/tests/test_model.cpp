/*
 * Copyright 2026 The vseens Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include "test_util.hpp"

#include <vseens/model.hpp>

#include <algorithm>
#include <numeric>

using namespace vseens;
using vseens::testing::make_model;
using vseens::testing::random_model;

TEST_CASE("score is the inner product of the two rows") {
  CHECK(score(make_model({{1, 0}}, {{0, 1}}), 0, 0) == 0.0);
  CHECK(score(make_model({{0, 0}}, {{3, -7}}), 0, 0) == 0.0);
  CHECK(score(make_model({{1, 2}}, {{3, 4}}), 0, 0) == 11.0);
}

TEST_CASE("score rejects out-of-range indices") {
  const auto m = make_model({{1, 2}}, {{3, 4}});
  CHECK_THROWS_AS(score(m, 1, 0), std::out_of_range);
  CHECK_THROWS_AS(score(m, 0, -1), std::out_of_range);
  CHECK_THROWS_AS(score(m, 0, 1), std::out_of_range);
}

TEST_CASE("score is linear in the image row") {
  std::mt19937_64 rng(3);
  auto m = random_model(2, 5, 6, rng);
  const double before = score(m, 1, 3);
  m.image(1) *= -2.5;
  CHECK(score(m, 1, 3) == doctest::Approx(-2.5 * before).epsilon(1e-12));
}

TEST_CASE("model construction enforces a shared k") {
  CHECK_THROWS(EmbeddingModel<double>(testing::rows({{1, 2}}), testing::rows({{1}})));
  CHECK_THROWS(EmbeddingModel<double>(1, 1, 0));
}

TEST_CASE("factor stats use the population form") {
  SUBCASE("k=1, factors {1,2,3}") {
    const auto s = compute_factor_stats(make_model({{1}}, {{1}, {2}, {3}}));
    CHECK(s.mu[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.sigma[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  }
  SUBCASE("identical rows give zero sigma") {
    const auto s = compute_factor_stats(make_model({{1, 1}}, {{4, -1}, {4, -1}, {4, -1}}));
    CHECK(s.sigma[0] == 0.0);
    CHECK(s.sigma[1] == 0.0);
  }
  SUBCASE("single annotation") {
    const auto s = compute_factor_stats(make_model({{1, 1}}, {{0.25, -3}}));
    CHECK(s.mu[0] == 0.25);
    CHECK(s.mu[1] == -3.0);
    CHECK(s.sigma[0] == 0.0);
    CHECK(s.sigma[1] == 0.0);
  }
}

TEST_CASE("factor stats match a direct loop and are idempotent") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(1, 37, 5, rng, 2.0);
    const auto s = compute_factor_stats(m);
    for (Index f = 0; f < m.dim(); ++f) {
      double mean = 0.0;
      for (Index a = 0; a < m.num_annotations(); ++a) mean += m.annotation_factors()(a, f);
      mean /= static_cast<double>(m.num_annotations());
      double var = 0.0;
      for (Index a = 0; a < m.num_annotations(); ++a) {
        const double d = m.annotation_factors()(a, f) - mean;
        var += d * d;
      }
      var /= static_cast<double>(m.num_annotations());
      CHECK(std::abs(s.mu[f] - mean) <= 1e-12);
      CHECK(std::abs(s.sigma[f] - std::sqrt(var)) <= 1e-12);
    }
    const auto again = compute_factor_stats(m);
    CHECK(again.mu == s.mu);
    CHECK(again.sigma == s.sigma);
  }
}

TEST_CASE("transformed score differs from score by a per-image constant") {
  SUBCASE("k=1 hand computation") {
    const auto m = make_model({{0.5}}, {{1}, {2}, {3}});
    const auto s = compute_factor_stats(m);
    for (Index a = 0; a < 3; ++a) {
      CHECK(transformed_score(m, s, 0, a) - score(m, 0, a) ==
            doctest::Approx(-1.0).epsilon(1e-12));
    }
  }
  SUBCASE("zero image row") {
    const auto m = make_model({{0, 0}}, {{1, 5}, {2, -1}, {3, 0}});
    const auto s = compute_factor_stats(m);
    for (Index a = 0; a < 3; ++a) CHECK(transformed_score(m, s, 0, a) == 0.0);
  }
  SUBCASE("zero-variance dimension contributes nothing") {
    const auto m = make_model({{2, 3}}, {{1, 7}, {4, 7}});
    const auto s = compute_factor_stats(m);
    // Only f=0 varies: mu=2.5, so s* = 2 * (v - 2.5).
    CHECK(transformed_score(m, s, 0, 0) == doctest::Approx(-3.0));
    CHECK(transformed_score(m, s, 0, 1) == doctest::Approx(3.0));
  }
  SUBCASE("random models, offset equals sum_f v_if mu_f") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const auto m = random_model(3, 40, 8, rng);
      const auto s = compute_factor_stats(m);
      for (Index i = 0; i < 3; ++i) {
        const double offset = m.image(i).dot(s.mu);
        for (Index a = 0; a < m.num_annotations(); ++a) {
          CHECK(std::abs(score(m, i, a) - transformed_score(m, s, i, a) - offset) <= 1e-9);
        }
      }
    }
  }
}

namespace {

std::vector<Index> order_by(const std::vector<double>& values) {
  std::vector<Index> idx(values.size());
  std::iota(idx.begin(), idx.end(), Index(0));
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    return values[a] > values[b] || (values[a] == values[b] && a < b);
  });
  return idx;
}

}  // namespace

TEST_CASE("orderings by score and transformed score agree (property)") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Index> dim(1, 16);
  std::uniform_int_distribution<Index> size(2, 200);
  std::uniform_real_distribution<double> scale(0.01, 3.0);
  std::size_t violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_model(1, size(rng), dim(rng), rng, scale(rng));
    const auto st = compute_factor_stats(m);
    std::vector<double> s(m.num_annotations()), t(m.num_annotations());
    for (Index a = 0; a < m.num_annotations(); ++a) {
      s[a] = score(m, 0, a);
      t[a] = transformed_score(m, st, 0, a);
    }
    std::vector<Index> pos(s.size());
    const auto by_t = order_by(t);
    for (std::size_t p = 0; p < by_t.size(); ++p) pos[by_t[p]] = static_cast<Index>(p);
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = 0; b < s.size(); ++b) {
        if (s[a] - s[b] > 1e-9 && pos[a] > pos[b]) ++violations;
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("sign treats zero as positive") {
  CHECK(sign(0.0) == 1.0);
  CHECK(sign(-0.0) == 1.0);
  CHECK(sign(-1e-300) == -1.0);
}
