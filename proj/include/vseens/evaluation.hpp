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

#pragma once

#include <vseens/dataset.hpp>
#include <vseens/model.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace vseens {

struct TestCase {
  Index image = 0;
  Index held_out = 0;

  bool operator==(const TestCase&) const = default;
};

/// Leave-one-out partition. Each test image appears once, its held-out
/// annotation is absent from `train`, and it keeps at least one training
/// positive.
struct Split {
  Dataset train;
  std::vector<TestCase> test;
  std::uint64_t seed = 0;
};

Split leave_one_out_split(const Dataset& dataset, std::uint64_t seed);

// Every annotation outside `exclusions` (sorted), by score descending with
// ties broken by ascending index.
std::vector<Index> rank_annotations(const EmbeddingModel<double>& model,
                                    Index image,
                                    std::span<const Index> exclusions);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

// Single relevant item: precision = hit / n, recall = hit.
PrecisionRecall precision_recall_at(std::span<const Index> ranked,
                                    Index held_out, Index n);

// sum_k P(k) * delta_recall(k) over the ranked list.
double average_precision(std::span<const Index> ranked,
                         std::span<const Index> relevant);

// Fraction of candidate negatives scored strictly below the held-out
// annotation, with half credit for ties. Candidates are all annotations not
// in `exclusions` (sorted) other than `held_out`.
double held_out_auc(std::span<const double> scores, Index held_out,
                    std::span<const Index> exclusions);

struct ImageMetrics {
  double pre5 = 0.0;
  double rec5 = 0.0;
  double pre10 = 0.0;
  double rec10 = 0.0;
  double average_precision = 0.0;
  double auc = 0.0;
  Index rank = 0;  // 1-based position of the held-out annotation
};

ImageMetrics evaluate_image(const EmbeddingModel<double>& model, Index image,
                            Index held_out, std::span<const Index> exclusions);

double mean_average_precision(std::span<const ImageMetrics> results);
double auc(std::span<const ImageMetrics> results);

struct MetricsReport {
  double pre5 = 0.0;
  double rec5 = 0.0;
  double pre10 = 0.0;
  double rec10 = 0.0;
  double map = 0.0;
  double auc = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport summarize(std::span<const ImageMetrics> results);

struct EvalOptions {
  bool exclude_train_positives = true;
  unsigned threads = 1;
};

// Per-image metrics are reduced in test order, so the report does not depend
// on `threads`.
MetricsReport evaluate(const EmbeddingModel<double>& model, const Dataset& train,
                       std::span<const TestCase> test,
                       const EvalOptions& options = {});

}  // namespace vseens
