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

#include <vseens/errors.hpp>
#include <vseens/evaluation.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <thread>

namespace vseens {

Split leave_one_out_split(const Dataset& dataset, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Split split;
  split.seed = seed;

  std::vector<Pair> removed;
  for (Index i = 0; i < dataset.num_images(); ++i) {
    const auto pos = dataset.positives(i);
    if (pos.size() < 2) {
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, pos.size() - 1);
    const Index held_out = pos[pick(rng)];
    split.test.push_back({i, held_out});
    removed.push_back({i, held_out});
  }
  std::sort(removed.begin(), removed.end());

  std::vector<Pair> kept;
  kept.reserve(dataset.size() - removed.size());
  for (const Pair& p : dataset.pairs()) {
    if (!std::binary_search(removed.begin(), removed.end(), p)) {
      kept.push_back(p);
    }
  }
  split.train = Dataset::from_pairs(dataset.num_images(),
                                    dataset.num_annotations(), std::move(kept));
  return split;
}

namespace {

bool excluded(std::span<const Index> exclusions, Index a) {
  return std::binary_search(exclusions.begin(), exclusions.end(), a);
}

std::vector<Index> rank_by_scores(std::span<const double> scores,
                                  std::span<const Index> exclusions) {
  std::vector<Index> ranked;
  ranked.reserve(scores.size());
  for (Index a = 0; a < static_cast<Index>(scores.size()); ++a) {
    if (!excluded(exclusions, a)) {
      ranked.push_back(a);
    }
  }
  std::sort(ranked.begin(), ranked.end(), [&](Index a, Index b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return sa > sb || (sa == sb && a < b);
  });
  return ranked;
}

Eigen::VectorXd all_scores(const EmbeddingModel<double>& model, Index image) {
  return model.annotation_factors() * model.image(image).transpose();
}

}  // namespace

std::vector<Index> rank_annotations(const EmbeddingModel<double>& model,
                                    Index image,
                                    std::span<const Index> exclusions) {
  const Eigen::VectorXd scores = all_scores(model, image);
  return rank_by_scores({scores.data(), static_cast<std::size_t>(scores.size())},
                        exclusions);
}

PrecisionRecall precision_recall_at(std::span<const Index> ranked,
                                    Index held_out, Index n) {
  if (n < 1) {
    throw std::invalid_argument("precision_recall_at: N must be >= 1");
  }
  const auto top = std::min<std::size_t>(static_cast<std::size_t>(n), ranked.size());
  const bool hit =
    std::find(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top),
              held_out) != ranked.begin() + static_cast<std::ptrdiff_t>(top);
  const double h = hit ? 1.0 : 0.0;
  return {h / static_cast<double>(n), h};
}

double average_precision(std::span<const Index> ranked,
                         std::span<const Index> relevant) {
  if (relevant.empty()) {
    return 0.0;
  }
  const double step = 1.0 / static_cast<double>(relevant.size());
  double hits = 0.0;
  double ap = 0.0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (std::find(relevant.begin(), relevant.end(), ranked[k]) == relevant.end()) {
      continue;
    }
    hits += 1.0;
    ap += (hits / static_cast<double>(k + 1)) * step;
  }
  return ap;
}

double held_out_auc(std::span<const double> scores, Index held_out,
                    std::span<const Index> exclusions) {
  const double target = scores[static_cast<std::size_t>(held_out)];
  double below = 0.0;
  double ties = 0.0;
  double negatives = 0.0;
  for (Index a = 0; a < static_cast<Index>(scores.size()); ++a) {
    if (a == held_out || excluded(exclusions, a)) {
      continue;
    }
    negatives += 1.0;
    const double s = scores[static_cast<std::size_t>(a)];
    if (s < target) {
      below += 1.0;
    } else if (s == target) {
      ties += 1.0;
    }
  }
  return negatives == 0.0 ? 1.0 : (below + 0.5 * ties) / negatives;
}

ImageMetrics evaluate_image(const EmbeddingModel<double>& model, Index image,
                            Index held_out, std::span<const Index> exclusions) {
  const Eigen::VectorXd scores = all_scores(model, image);
  const std::span<const double> view(scores.data(),
                                     static_cast<std::size_t>(scores.size()));
  const std::vector<Index> ranked = rank_by_scores(view, exclusions);

  ImageMetrics m;
  const auto it = std::find(ranked.begin(), ranked.end(), held_out);
  m.rank = static_cast<Index>(it - ranked.begin()) + 1;
  const auto at5 = precision_recall_at(ranked, held_out, 5);
  const auto at10 = precision_recall_at(ranked, held_out, 10);
  m.pre5 = at5.precision;
  m.rec5 = at5.recall;
  m.pre10 = at10.precision;
  m.rec10 = at10.recall;
  const Index relevant[] = {held_out};
  m.average_precision = average_precision(ranked, relevant);
  m.auc = held_out_auc(view, held_out, exclusions);
  return m;
}

namespace {

template <typename Field>
double mean_of(std::span<const ImageMetrics> results, Field field) {
  if (results.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (const auto& r : results) {
    total += r.*field;
  }
  return total / static_cast<double>(results.size());
}

}  // namespace

double mean_average_precision(std::span<const ImageMetrics> results) {
  return mean_of(results, &ImageMetrics::average_precision);
}

double auc(std::span<const ImageMetrics> results) {
  return mean_of(results, &ImageMetrics::auc);
}

MetricsReport summarize(std::span<const ImageMetrics> results) {
  MetricsReport report;
  // One relevant item per image: precision@N is recall@N / N.
  report.rec5 = mean_of(results, &ImageMetrics::rec5);
  report.rec10 = mean_of(results, &ImageMetrics::rec10);
  report.pre5 = report.rec5 / 5.0;
  report.pre10 = report.rec10 / 10.0;
  report.map = mean_average_precision(results);
  report.auc = auc(results);
  return report;
}

MetricsReport evaluate(const EmbeddingModel<double>& model, const Dataset& train,
                       std::span<const TestCase> test, const EvalOptions& options) {
  if (model.num_images() < train.num_images() ||
      model.num_annotations() != train.num_annotations()) {
    throw ConfigError("model shape does not match the training dataset");
  }
  std::vector<ImageMetrics> results(test.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const TestCase& tc = test[j];
      const std::span<const Index> exclusions =
        options.exclude_train_positives ? train.positives(tc.image)
                                        : std::span<const Index>{};
      results[j] = evaluate_image(model, tc.image, tc.held_out, exclusions);
    }
  };

  const std::size_t workers =
    std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(test.size(), 1));
  if (workers == 1) {
    work(0, test.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (test.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(test.size(), begin + chunk);
      if (begin < end) {
        pool.emplace_back(work, begin, end);
      }
    }
  }
  return summarize(results);
}

}  // namespace vseens
