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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace vseens {

using Rng = std::mt19937_64;
using Model = EmbeddingModel<double>;
using Stats = FactorStats<double>;

struct SamplerConfig {
  // Rank distribution p(r) ~ exp(-r / (lambda * |A|)); lambda is a fraction of
  // the dictionary size.
  double lambda = 0.1;
  // Draws between cache refreshes; 0 selects ceil(|A| log2 |A|).
  std::size_t refresh_interval = 0;
  // Redraws allowed when the adaptive sampler lands on a positive before
  // falling back to a uniform non-positive.
  std::size_t max_rejects = 100;
  // When false the adaptive sampler returns whatever annotation it lands on.
  bool reject_positives = true;

  void validate() const;
};

std::size_t default_refresh_interval(Index num_annotations);
std::size_t effective_refresh_interval(const SamplerConfig& config,
                                       Index num_annotations);

/// Per-dimension annotation orderings plus the factor statistics they were
/// built from. Column f of `order` lists annotation indices by v_{a,f}
/// descending, ties by ascending index.
struct RankingCache {
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> order;
  Stats stats;
  std::size_t age = 0;

  Index num_annotations() const { return order.rows(); }
  Index dim() const { return order.cols(); }

  // Annotation holding 1-based rank r under dimension f for an image whose
  // factor sign is `sgn`: position r from the top when sgn > 0, position
  // |A| - r + 1 otherwise.
  Index annotation_at(Index f, Index rank, double sgn) const;
};

struct TrialCounter {
  std::uint64_t accepted = 0;
  std::uint64_t candidate_evaluations = 0;

  double mean_trials() const {
    return accepted == 0 ? 0.0
                         : static_cast<double>(candidate_evaluations) /
                             static_cast<double>(accepted);
  }
};

struct NegativeDraw {
  Index annotation = 0;
  std::size_t trials = 0;
};

struct WarpDraw {
  std::optional<Index> annotation;
  std::size_t trials = 0;
};

Pair draw_positive(const Dataset& dataset, Rng& rng);

// 1-based rank from the truncated exponential over [1, num_annotations].
Index draw_rank(const SamplerConfig& config, Index num_annotations, Rng& rng);

// Dimension f with probability |v_if| sigma_f / sum_g |v_ig| sigma_g, uniform
// when every weight is zero.
Index draw_dimension(const Model& model, const Stats& stats, Index image,
                     Rng& rng);

RankingCache refresh_cache(const Model& model, std::uint64_t drawn_at = 0);

// Counts one draw against the cache and rebuilds it once `refresh_interval`
// draws have accumulated. Returns true when a refresh happened.
bool on_draw(RankingCache& cache, const Model& model,
             std::size_t refresh_interval, std::uint64_t drawn_at = 0);

NegativeDraw draw_negative_adaptive(const Model& model,
                                    const RankingCache& cache,
                                    const Dataset& dataset, Index image,
                                    const SamplerConfig& config, Rng& rng);

// Uniform non-positive candidates until one satisfies 1 + s(a_n) > s(a_p),
// at most |A| - 1 evaluations.
WarpDraw draw_negative_warp(const Model& model, const Dataset& dataset,
                            Index image, Index positive, Rng& rng,
                            TrialCounter& counter);

Index draw_negative_uniform(const Dataset& dataset, Index image, Rng& rng);

}  // namespace vseens
