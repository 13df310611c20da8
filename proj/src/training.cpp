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
#include <vseens/training.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace vseens {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::VseEns:
      return "vse-ens";
    case Method::Warp:
      return "warp";
    case Method::OptAuc:
      return "opt-auc";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "vse-ens" || name == "vse_ens") return Method::VseEns;
  if (name == "warp") return Method::Warp;
  if (name == "opt-auc" || name == "opt_auc") return Method::OptAuc;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

int default_epochs(Method method) {
  switch (method) {
    case Method::VseEns:
      return 200;
    case Method::Warp:
      return 150;
    case Method::OptAuc:
      return 800;
  }
  return 200;
}

RankWeighting::RankWeighting(Kind kind, Index num_annotations)
  : kind_(kind), num_annotations_(std::max<Index>(num_annotations, 2)) {
  cumulative_.assign(static_cast<std::size_t>(num_annotations_), 0.0);
  for (Index r = 1; r < num_annotations_; ++r) {
    cumulative_[static_cast<std::size_t>(r)] =
      cumulative_[static_cast<std::size_t>(r - 1)] + xi(r);
  }
}

double RankWeighting::xi(Index j) const {
  if (j < 1) {
    return 0.0;
  }
  return kind_ == Kind::Harmonic ? 1.0 / static_cast<double>(j)
                                 : 1.0 / static_cast<double>(num_annotations_ - 1);
}

double RankWeighting::loss(Index rank) const {
  const Index r = std::clamp<Index>(rank, 0, num_annotations_ - 1);
  return cumulative_[static_cast<std::size_t>(r)];
}

int TrainConfig::resolved_epochs() const {
  return epochs ? *epochs : default_epochs(method);
}

void TrainConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (!(reg >= 0.0)) throw ConfigError("reg must be non-negative");
  if (k < 1) throw ConfigError("k must be at least 1");
  if (epochs && *epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(init_std >= 0.0)) throw ConfigError("init_std must be non-negative");
  sampler.validate();
}

bool hinge_update(Model& model, const Triplet& t, double eta, double reg,
                  double weight) {
  auto v_i = model.image(t.image);
  auto v_p = model.annotation(t.positive);
  auto v_n = model.annotation(t.negative);
  const double margin = 1.0 - v_i.dot(v_p) + v_i.dot(v_n);
  if (!(margin > 0.0)) {
    return false;
  }
  const Eigen::RowVectorXd image_old = v_i;
  const Eigen::RowVectorXd diff = v_p - v_n;
  const double step = eta * weight;
  v_i += step * diff - eta * reg * image_old;
  v_p += step * image_old - eta * reg * v_p;
  v_n += -step * image_old - eta * reg * v_n;
  return true;
}

void logistic_update(Model& model, const Triplet& t, double eta, double reg) {
  auto v_i = model.image(t.image);
  auto v_p = model.annotation(t.positive);
  auto v_n = model.annotation(t.negative);
  const double x = v_i.dot(v_p) - v_i.dot(v_n);
  // d/dx [-log sigmoid(x)] = -sigmoid(-x)
  const double multiplier = 1.0 / (1.0 + std::exp(x));
  const Eigen::RowVectorXd image_old = v_i;
  const Eigen::RowVectorXd diff = v_p - v_n;
  const double step = eta * multiplier;
  v_i += step * diff - eta * reg * image_old;
  v_p += step * image_old - eta * reg * v_p;
  v_n += -step * image_old - eta * reg * v_n;
}

Index warp_rank_estimate(std::size_t trials, Index num_annotations) {
  if (trials == 0) {
    throw std::invalid_argument("warp_rank_estimate: trials must be positive");
  }
  return (num_annotations - 1) / static_cast<Index>(trials);
}

Index exact_violation_rank(const Model& model, const Dataset& dataset,
                           Index image, Index positive) {
  const auto v_i = model.image(image);
  const double threshold = v_i.dot(model.annotation(positive)) - 1.0;
  const Eigen::VectorXd scores = model.annotation_factors() * v_i.transpose();
  Index rank = 0;
  for (Index a = 0; a < model.num_annotations(); ++a) {
    if (scores[a] > threshold && !dataset.is_positive(image, a)) {
      ++rank;
    }
  }
  return rank;
}

Model init_model(Index num_images, Index num_annotations, Index k,
                 double init_std, std::uint64_t seed) {
  Model model(num_images, num_annotations, k);
  Rng rng(seed);
  if (init_std > 0.0) {
    std::normal_distribution<double> normal(0.0, init_std);
    model.fill([&] { return normal(rng); });
  }
  return model;
}

Trainer::Trainer(const Dataset& dataset, TrainConfig config)
  : Trainer(dataset, config,
            init_model(dataset.num_images(), dataset.num_annotations(),
                       config.k, config.init_std, config.seed)) {}

Trainer::Trainer(const Dataset& dataset, TrainConfig config, Model initial)
  : dataset_(dataset),
    config_(std::move(config)),
    model_(std::move(initial)),
    // Decorrelate the SGD stream from the initialization stream.
    rng_(config_.seed ^ 0x9E3779B97F4A7C15ULL),
    weighting_(config_.weighting, dataset.num_annotations()) {
  config_.validate();
  if (model_.num_images() != dataset.num_images() ||
      model_.num_annotations() != dataset.num_annotations()) {
    throw ConfigError("model shape does not match the dataset");
  }
  if (config_.method == Method::VseEns) {
    refresh_interval_ =
      effective_refresh_interval(config_.sampler, dataset.num_annotations());
    cache_ = refresh_cache(model_, 0);
  }
}

EpochStats Trainer::run_epoch() {
  EpochStats stats;
  stats.epoch = ++epoch_;
  TrialCounter counter;
  double violation_sum = 0.0;

  const auto epoch_start = Clock::now();
  const std::size_t scheduled = dataset_.size();
  for (std::size_t step = 0; step < scheduled; ++step) {
    const Pair positive = draw_positive(dataset_, rng_);
    const Index image = positive.image;

    std::optional<Index> negative;
    double weight = 1.0;
    const auto draw_start = Clock::now();
    switch (config_.method) {
      case Method::VseEns: {
        on_draw(*cache_, model_, refresh_interval_, draws_);
        const NegativeDraw d = draw_negative_adaptive(
          model_, *cache_, dataset_, image, config_.sampler, rng_);
        counter.candidate_evaluations += d.trials;
        ++counter.accepted;
        negative = d.annotation;
        break;
      }
      case Method::Warp: {
        const WarpDraw d = draw_negative_warp(model_, dataset_, image,
                                              positive.annotation, rng_, counter);
        negative = d.annotation;
        if (negative) {
          const Index rank =
            config_.exact_rank
              ? exact_violation_rank(model_, dataset_, image, positive.annotation)
              : warp_rank_estimate(d.trials, dataset_.num_annotations());
          weight = weighting_.loss(rank);
        }
        break;
      }
      case Method::OptAuc: {
        negative = draw_negative_uniform(dataset_, image, rng_);
        ++counter.candidate_evaluations;
        ++counter.accepted;
        break;
      }
    }
    stats.sampling_time += seconds_since(draw_start);
    ++draws_;

    if (!negative) {
      ++stats.skipped;
      continue;
    }
    const Triplet t{image, positive.annotation, *negative};
    violation_sum += std::max(0.0, 1.0 - score(model_, image, t.positive) +
                                     score(model_, image, t.negative));
    if (config_.method == Method::OptAuc) {
      logistic_update(model_, t, config_.eta, config_.reg);
    } else {
      hinge_update(model_, t, config_.eta, config_.reg, weight);
    }
    ++stats.updates;
  }
  stats.wall_time = seconds_since(epoch_start);
  stats.draws = scheduled;
  stats.mean_trials = counter.accepted > 0
                        ? counter.mean_trials()
                        : static_cast<double>(counter.candidate_evaluations) /
                            static_cast<double>(std::max<std::size_t>(scheduled, 1));
  stats.mean_margin_violation =
    stats.updates == 0 ? 0.0 : violation_sum / static_cast<double>(stats.updates);
  return stats;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  Trainer trainer(dataset, config);
  TrainResult result;
  const int epochs = config.resolved_epochs();
  result.epochs.reserve(static_cast<std::size_t>(epochs));
  for (int e = 0; e < epochs; ++e) {
    result.epochs.push_back(trainer.run_epoch());
    if (on_epoch) {
      on_epoch(trainer, result.epochs.back());
    }
  }
  result.model = trainer.model();
  return result;
}

}  // namespace vseens
