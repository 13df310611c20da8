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

#include <vseens/evaluation.hpp>
#include <vseens/io.hpp>

#include <algorithm>
#include <numeric>

using namespace vseens;
using vseens::testing::make_model;
using vseens::testing::random_model;

TEST_CASE("leave-one-out split") {
  const auto ds = Dataset::from_pairs(
    4, 6, {{0, 1}, {1, 0}, {1, 2}, {1, 5}, {2, 3}, {2, 4}, {3, 0}});
  const Split split = leave_one_out_split(ds, 5);
  // Images 0 and 3 have a single positive and stay train-only.
  REQUIRE(split.test.size() == 2);
  CHECK(split.test[0].image == 1);
  CHECK(split.test[1].image == 2);
  CHECK(split.train.size() == ds.size() - 2);
  CHECK(split.train.num_annotations() == 6);
  for (const auto& tc : split.test) {
    CHECK(ds.is_positive(tc.image, tc.held_out));
    CHECK_FALSE(split.train.is_positive(tc.image, tc.held_out));
    CHECK(split.train.positives(tc.image).size() >= 1);
  }

  const Split again = leave_one_out_split(ds, 5);
  CHECK(again.test == split.test);
  CHECK(again.train == split.train);

  SyntheticSpec spec;
  spec.num_images = 300;
  spec.num_annotations = 40;
  spec.positives_per_image = 4;
  const auto planted = gen_synthetic(spec).dataset;
  const Split full = leave_one_out_split(planted, 1);
  CHECK(full.test.size() == 300);
  for (std::size_t j = 0; j < full.test.size(); ++j) {
    CHECK(full.test[j].image == static_cast<Index>(j));
  }
}

TEST_CASE("rank_annotations") {
  SUBCASE("zero model ties resolve to index order") {
    const Model zero(1, 5, 2);
    const auto ranked = rank_annotations(zero, 0, {});
    CHECK(ranked == std::vector<Index>{0, 1, 2, 3, 4});
  }
  SUBCASE("k=1 with positive image factor follows the factor order") {
    const auto m = make_model({{0.5}}, {{0.1}, {2.0}, {-1.0}, {0.7}});
    CHECK(rank_annotations(m, 0, {}) == std::vector<Index>{1, 3, 0, 2});
  }
  SUBCASE("exclusions never appear") {
    std::mt19937_64 gen(1);
    const auto m = random_model(1, 30, 4, gen);
    const std::vector<Index> excl{2, 3, 17, 29};
    const auto ranked = rank_annotations(m, 0, excl);
    CHECK(ranked.size() == 26);
    for (Index a : excl) CHECK(std::find(ranked.begin(), ranked.end(), a) == ranked.end());
  }
}

TEST_CASE("per-image metrics") {
  const std::vector<Index> ranked{4, 2, 7, 1, 0, 3, 5, 6};
  auto pr = precision_recall_at(ranked, 4, 5);
  CHECK(pr.precision == 0.2);
  CHECK(pr.recall == 1.0);
  pr = precision_recall_at(ranked, 3, 5);
  CHECK(pr.precision == 0.0);
  CHECK(pr.recall == 0.0);
  CHECK_THROWS(precision_recall_at(ranked, 3, 0));

  const Index held[] = {7};
  CHECK(average_precision(ranked, held) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const Index two[] = {2, 0};
  CHECK(average_precision(ranked, two) == doctest::Approx(0.5 * (0.5 + 2.0 / 5.0)));

  const std::vector<double> top{5.0, 1.0, 2.0, 3.0, 4.0};
  CHECK(held_out_auc(top, 0, {}) == 1.0);
  const std::vector<double> middle{1.0, 3.0, 0.0, 2.0, -1.0};
  CHECK(held_out_auc(middle, 0, {}) == 0.5);
  CHECK(held_out_auc(middle, 3, {}) == 0.75);
  const std::vector<double> tied{1.0, 1.0, 0.0};
  CHECK(held_out_auc(tied, 0, {}) == 0.75);
  const Index excl[] = {2};
  CHECK(held_out_auc(tied, 0, excl) == 0.5);
}

TEST_CASE("random scores give AUC near one half") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores(20);
  double total = 0.0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    for (double& s : scores) s = u(rng);
    total += held_out_auc(scores, t % 20, {});
  }
  CHECK(std::abs(total / trials - 0.5) < 0.01);
}

namespace {

struct Brute {
  double pre5, rec5, ap, auc;
  Index rank;
};

// Definition-level oracle: pairwise enumeration for the rank and AUC, and the
// P(k) * delta r(k) sum over list positions for AveP.
Brute brute_force(const Model& m, Index image, Index held_out,
                  std::span<const Index> excluded) {
  const auto is_excluded = [&](Index a) {
    return std::find(excluded.begin(), excluded.end(), a) != excluded.end();
  };
  const double h = score(m, image, held_out);
  Index above = 0;
  double below = 0, ties = 0, negatives = 0;
  for (Index a = 0; a < m.num_annotations(); ++a) {
    if (a == held_out || is_excluded(a)) continue;
    const double s = score(m, image, a);
    negatives += 1;
    if (s > h || (s == h && a < held_out)) ++above;
    if (s < h) below += 1;
    if (s == h) ties += 1;
  }
  Brute b{};
  b.rank = above + 1;
  b.pre5 = b.rank <= 5 ? 0.2 : 0.0;
  b.rec5 = b.rank <= 5 ? 1.0 : 0.0;
  double ap = 0.0;
  for (Index k = 1; k <= above + 1 + static_cast<Index>(negatives); ++k) {
    const double precision_at_k = k >= b.rank ? 1.0 / static_cast<double>(k) : 0.0;
    const double delta_recall = k == b.rank ? 1.0 : 0.0;
    ap += precision_at_k * delta_recall;
  }
  b.ap = ap;
  b.auc = (below + 0.5 * ties) / negatives;
  return b;
}

}  // namespace

TEST_CASE("hand-built instance matches brute force") {
  const auto m = make_model({{1.0, 0.0}, {0.0, 1.0}, {0.5, -0.5}},
                            {{0.9, 0.1},
                             {0.2, 0.8},
                             {0.5, 0.5},
                             {-0.3, 0.4},
                             {0.6, -0.9},
                             {0.1, 0.1}});
  const auto train = Dataset::from_pairs(3, 6, {{0, 0}, {1, 1}, {2, 4}});
  const std::vector<TestCase> test{{0, 2}, {1, 5}, {2, 3}};

  double pre5 = 0, rec5 = 0, map = 0, auc_sum = 0;
  for (const auto& tc : test) {
    const Brute b = brute_force(m, tc.image, tc.held_out, train.positives(tc.image));
    const ImageMetrics im =
      evaluate_image(m, tc.image, tc.held_out, train.positives(tc.image));
    CHECK(im.rank == b.rank);
    pre5 += b.pre5;
    rec5 += b.rec5;
    map += b.ap;
    auc_sum += b.auc;
  }
  const MetricsReport r = evaluate(m, train, test);
  CHECK(std::abs(r.pre5 - pre5 / 3) <= 1e-12);
  CHECK(std::abs(r.rec5 - rec5 / 3) <= 1e-12);
  CHECK(std::abs(r.map - map / 3) <= 1e-12);
  CHECK(std::abs(r.auc - auc_sum / 3) <= 1e-12);
  CHECK(r.pre5 == r.rec5 / 5.0);
  CHECK(r.pre10 == r.rec10 / 10.0);
  CHECK(r.rec5 == doctest::Approx(5.0 * r.pre5).epsilon(1e-15));
}

TEST_CASE("metric properties on random models") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = random_model(20, 50, 4, gen);
    std::vector<Pair> pairs;
    std::vector<TestCase> test;
    for (Index i = 0; i < 20; ++i) {
      pairs.push_back({i, (i * 7) % 50});
      pairs.push_back({i, (i * 7 + 3) % 50});
      test.push_back({i, (i * 7 + 5) % 50});
    }
    const auto train = Dataset::from_pairs(20, 50, pairs);
    std::vector<ImageMetrics> results;
    for (const auto& tc : test) {
      results.push_back(evaluate_image(m, tc.image, tc.held_out, train.positives(tc.image)));
      const auto& im = results.back();
      // Random continuous scores have no ties.
      CHECK(im.auc == doctest::Approx(1.0 - static_cast<double>(im.rank - 1) / 47.0));
      CHECK(im.average_precision == doctest::Approx(1.0 / static_cast<double>(im.rank)));
    }
    const auto r = summarize(results);
    CHECK(r.pre5 == r.rec5 / 5.0);
    CHECK(r.pre10 == r.rec10 / 10.0);
    for (double v : {r.pre5, r.rec5, r.pre10, r.rec10, r.map, r.auc}) {
      CHECK((v >= 0.0 && v <= 1.0));
    }

    // Positive rescaling of every image row is strictly increasing per image.
    Model scaled = m;
    for (Index i = 0; i < 20; ++i) scaled.image(i) *= 3.5;
    CHECK(evaluate(scaled, train, test) == evaluate(m, train, test));

    // Worker count does not change the reduction.
    EvalOptions threaded;
    threaded.threads = 3;
    CHECK(evaluate(m, train, test, threaded) == evaluate(m, train, test));
  }
}

TEST_CASE("moving the held-out annotation up never lowers a metric") {
  std::vector<double> scores{0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0, -0.1, -0.2};
  const Index held_out = 11;
  double prev_auc = -1.0, prev_ap = -1.0, prev_pre = -1.0;
  for (int step = 0; step < 13; ++step) {
    std::vector<Index> ranked(scores.size());
    std::iota(ranked.begin(), ranked.end(), Index(0));
    std::sort(ranked.begin(), ranked.end(),
              [&](Index a, Index b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
    const Index rel[] = {held_out};
    const double auc_now = held_out_auc(scores, held_out, {});
    const double ap_now = average_precision(ranked, rel);
    const double pre_now = precision_recall_at(ranked, held_out, 5).precision;
    CHECK(auc_now >= prev_auc);
    CHECK(ap_now >= prev_ap);
    CHECK(pre_now >= prev_pre);
    prev_auc = auc_now;
    prev_ap = ap_now;
    prev_pre = pre_now;
    scores[held_out] += 0.1;
  }
  CHECK(prev_auc == 1.0);
}

TEST_CASE("training positives can be kept as candidates") {
  const auto m = make_model({{1.0}}, {{3.0}, {2.0}, {1.0}});
  const auto train = Dataset::from_pairs(1, 3, {{0, 0}});
  const std::vector<TestCase> test{{0, 1}};
  CHECK(evaluate(m, train, test).map == 1.0);
  EvalOptions keep;
  keep.exclude_train_positives = false;
  const auto r = evaluate(m, train, test, keep);
  CHECK(r.map == 0.5);
  CHECK(r.auc == 0.5);
}
