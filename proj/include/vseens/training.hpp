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
#include <vseens/samplers.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace vseens {

enum class Method { VseEns, Warp, OptAuc };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

// Default epoch budgets follow the reported convergence points.
int default_epochs(Method method);

/// Rank-to-loss map L(r) = sum_{j<=r} xi_j, tabulated for r in [0, |A|-1].
class RankWeighting {
 public:
  enum class Kind { Harmonic, MeanRank };

  RankWeighting(Kind kind, Index num_annotations);

  Kind kind() const { return kind_; }
  double xi(Index j) const;
  double loss(Index rank) const;

 private:
  Kind kind_;
  Index num_annotations_;
  std::vector<double> cumulative_;
};

struct TrainConfig {
  Method method = Method::VseEns;
  double eta = 0.01;
  double reg = 0.01;
  Index k = 100;
  std::optional<int> epochs;  // unset selects default_epochs(method)
  double init_std = 0.01;
  std::uint64_t seed = 42;
  SamplerConfig sampler;
  RankWeighting::Kind weighting = RankWeighting::Kind::Harmonic;
  // Use the exact violation count for WARP weights instead of the trial-count
  // estimate. O(|A| k) per update; meant for small problems.
  bool exact_rank = false;

  int resolved_epochs() const;
  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  std::uint64_t updates = 0;
  std::uint64_t skipped = 0;
  // Candidate evaluations per accepted negative.
  double mean_trials = 0.0;
  double wall_time = 0.0;
  // Time spent inside negative sampling, including cache refreshes.
  double sampling_time = 0.0;
  std::uint64_t draws = 0;
  double mean_margin_violation = 0.0;

  double ns_per_draw() const {
    return draws == 0 ? 0.0 : 1e9 * sampling_time / static_cast<double>(draws);
  }
};

// Hinge step on max(0, 1 - s_p + s_n) scaled by `weight`, plus L2 on the three
// touched rows. No-op when the margin holds. Returns whether it stepped.
bool hinge_update(Model& model, const Triplet& t, double eta, double reg,
                  double weight = 1.0);

// Step on -log sigmoid(s_p - s_n) plus L2 on the touched rows.
void logistic_update(Model& model, const Triplet& t, double eta, double reg);

// floor((|A| - 1) / trials). Throws std::invalid_argument for trials == 0.
Index warp_rank_estimate(std::size_t trials, Index num_annotations);

// Number of non-positives n with 1 + s(a_n) > s(a_p).
Index exact_violation_rank(const Model& model, const Dataset& dataset,
                           Index image, Index positive);

Model init_model(Index num_images, Index num_annotations, Index k,
                 double init_std, std::uint64_t seed);

/// Sequential SGD over one dataset. Holds the model, the generator and the
/// sampler state that persists across epochs.
class Trainer {
 public:
  Trainer(const Dataset& dataset, TrainConfig config);
  Trainer(const Dataset& dataset, TrainConfig config, Model initial);

  // |pairs| scheduled updates.
  EpochStats run_epoch();

  const Model& model() const { return model_; }
  Model& model() { return model_; }
  const TrainConfig& config() const { return config_; }
  int epochs_run() const { return epoch_; }

 private:
  const Dataset& dataset_;
  TrainConfig config_;
  Model model_;
  Rng rng_;
  RankWeighting weighting_;
  std::optional<RankingCache> cache_;
  std::size_t refresh_interval_ = 1;
  std::uint64_t draws_ = 0;
  int epoch_ = 0;
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> epochs;
};

using EpochCallback = std::function<void(const Trainer&, const EpochStats&)>;

TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace vseens
