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
#include <vseens/samplers.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vseens {

namespace {

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

Index uniform_index(Index n, Rng& rng) {
  return std::uniform_int_distribution<Index>(0, n - 1)(rng);
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be positive");
  }
}

std::size_t default_refresh_interval(Index num_annotations) {
  const double n = static_cast<double>(std::max<Index>(num_annotations, 1));
  return std::max<std::size_t>(
    1, static_cast<std::size_t>(std::ceil(n * std::log2(n))));
}

std::size_t effective_refresh_interval(const SamplerConfig& config,
                                       Index num_annotations) {
  return config.refresh_interval == 0
           ? default_refresh_interval(num_annotations)
           : config.refresh_interval;
}

Index RankingCache::annotation_at(Index f, Index rank, double sgn) const {
  const Index n = num_annotations();
  if (rank < 1 || rank > n || f < 0 || f >= dim()) {
    throw std::out_of_range("rank or dimension out of range");
  }
  const Index position = sgn > 0.0 ? rank - 1 : n - rank;
  return order(position, f);
}

Pair draw_positive(const Dataset& dataset, Rng& rng) {
  if (dataset.size() == 0) {
    throw ConfigError("cannot draw from an empty dataset");
  }
  const auto pairs = dataset.pairs();
  return pairs[static_cast<std::size_t>(
    uniform_index(static_cast<Index>(pairs.size()), rng))];
}

Index draw_rank(const SamplerConfig& config, Index num_annotations, Rng& rng) {
  if (num_annotations <= 1) {
    return 1;
  }
  // Truncated geometric with ratio q = exp(-rate):
  //   F(r) = (1 - q^r) / (1 - q^n),  r = ceil(-log(1 - u (1 - q^n)) / rate).
  const double n = static_cast<double>(num_annotations);
  const double rate = 1.0 / (config.lambda * n);
  const double mass = -std::expm1(-rate * n);
  const double u = uniform01(rng);
  const double r = std::ceil(-std::log1p(-u * mass) / rate);
  if (!(r >= 1.0)) {
    return 1;
  }
  return std::min<Index>(num_annotations, static_cast<Index>(r));
}

Index draw_dimension(const Model& model, const Stats& stats, Index image,
                     Rng& rng) {
  const auto v_i = model.image(image);
  const Index k = model.dim();
  const double total = (v_i.array().abs() * stats.sigma.array()).sum();
  if (!(total > 0.0)) {
    return uniform_index(k, rng);
  }
  double target = uniform01(rng) * total;
  Index last_positive = 0;
  for (Index f = 0; f < k; ++f) {
    const double w = std::abs(v_i[f]) * stats.sigma[f];
    if (w <= 0.0) {
      continue;
    }
    last_positive = f;
    if (target < w) {
      return f;
    }
    target -= w;
  }
  // Rounding can leave target marginally above the last weight.
  return last_positive;
}

RankingCache refresh_cache(const Model& model, std::uint64_t drawn_at) {
  const Index n = model.num_annotations();
  const Index k = model.dim();
  const auto& factors = model.annotation_factors();

  RankingCache cache;
  cache.order.resize(n, k);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index f = 0; f < k; ++f) {
    std::iota(idx.begin(), idx.end(), Index(0));
    std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
      const double va = factors(a, f);
      const double vb = factors(b, f);
      return va > vb || (va == vb && a < b);
    });
    std::copy(idx.begin(), idx.end(), cache.order.col(f).data());
  }
  cache.stats = compute_factor_stats(model, drawn_at);
  cache.age = 0;
  return cache;
}

bool on_draw(RankingCache& cache, const Model& model,
             std::size_t refresh_interval, std::uint64_t drawn_at) {
  ++cache.age;
  if (cache.age >= refresh_interval) {
    cache = refresh_cache(model, drawn_at);
    return true;
  }
  return false;
}

NegativeDraw draw_negative_adaptive(const Model& model,
                                    const RankingCache& cache,
                                    const Dataset& dataset, Index image,
                                    const SamplerConfig& config, Rng& rng) {
  const Index n = cache.num_annotations();
  if (config.reject_positives && dataset.num_negatives(image) == 0) {
    throw ConfigError("image " + std::to_string(image) +
                      " has every annotation as a positive");
  }
  const auto v_i = model.image(image);

  NegativeDraw out;
  const std::size_t attempts = config.reject_positives ? config.max_rejects + 1 : 1;
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    const Index r = draw_rank(config, n, rng);
    const Index f = draw_dimension(model, cache.stats, image, rng);
    const Index a = cache.annotation_at(f, r, sign(v_i[f]));
    ++out.trials;
    if (!config.reject_positives || !dataset.is_positive(image, a)) {
      out.annotation = a;
      return out;
    }
  }
  ++out.trials;
  out.annotation = draw_negative_uniform(dataset, image, rng);
  return out;
}

WarpDraw draw_negative_warp(const Model& model, const Dataset& dataset,
                            Index image, Index positive, Rng& rng,
                            TrialCounter& counter) {
  WarpDraw out;
  const Index negatives = dataset.num_negatives(image);
  if (negatives == 0) {
    return out;
  }
  const auto v_i = model.image(image);
  const double positive_score = v_i.dot(model.annotation(positive));
  const auto cap = static_cast<std::size_t>(
    std::max<Index>(1, dataset.num_annotations() - 1));
  while (out.trials < cap) {
    const Index candidate =
      dataset.nth_negative(image, uniform_index(negatives, rng));
    ++out.trials;
    ++counter.candidate_evaluations;
    if (1.0 + v_i.dot(model.annotation(candidate)) > positive_score) {
      out.annotation = candidate;
      ++counter.accepted;
      return out;
    }
  }
  return out;
}

Index draw_negative_uniform(const Dataset& dataset, Index image, Rng& rng) {
  const Index negatives = dataset.num_negatives(image);
  if (negatives == 0) {
    throw ConfigError("image " + std::to_string(image) +
                      " has every annotation as a positive");
  }
  return dataset.nth_negative(image, uniform_index(negatives, rng));
}

}  // namespace vseens
