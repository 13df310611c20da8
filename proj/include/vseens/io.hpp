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
#include <vseens/evaluation.hpp>
#include <vseens/model.hpp>
#include <vseens/training.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vseens {

/// Token <-> dense index table. New tokens get the next index.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  Index intern(std::string_view token);
  std::optional<Index> find(std::string_view token) const;
  const std::string& token(Index index) const;
  Index size() const { return static_cast<Index>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Index> index_;
};

// Tokens prefix0, prefix1, ... in index order.
Vocabulary numbered_vocabulary(std::string_view prefix, Index n);

struct PairsFile {
  std::vector<Pair> pairs;  // de-duplicated, file order
  Vocabulary images;
  Vocabulary annotations;
  std::size_t duplicates = 0;
};

// Reads `image<TAB>annotation` lines; `#` lines and blank lines are skipped.
// Tokens already present in the supplied vocabularies keep their indices;
// unseen tokens are appended in first-seen order unless `frozen` is set, in
// which case they are a ParseError.
PairsFile load_pairs(const std::filesystem::path& path, Vocabulary images = {},
                     Vocabulary annotations = {}, bool frozen = false);

// Builds a Dataset sized by the vocabularies.
Dataset to_dataset(const PairsFile& file);

void write_pairs(const std::filesystem::path& path, std::span<const Pair> pairs,
                 const Vocabulary& images, const Vocabulary& annotations);

void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::filesystem::path& path);

struct SyntheticSpec {
  Index num_images = 500;
  Index num_annotations = 500;
  Index true_rank = 4;
  Index positives_per_image = 10;
  double noise = 0.0;
  std::uint64_t seed = 42;
};

struct SyntheticData {
  Dataset dataset;
  EmbeddingModel<double> truth;
};

/// Planted low-rank data: standard normal ground-truth factors, each image's
/// positives are its top-scoring annotations, and every positive is
/// independently replaced by a uniform random annotation with probability
/// `noise`.
SyntheticData gen_synthetic(const SyntheticSpec& spec);

std::string trial_log_csv(std::span<const EpochStats> epochs);
void write_trial_log(const std::filesystem::path& path,
                     std::span<const EpochStats> epochs);

std::string metrics_json(const MetricsReport& report);
void write_metrics(const std::filesystem::path& path, const MetricsReport& report);

// Text checkpoint: "VSEENS 1 <images> <annotations> <k>" then one row per line,
// image rows first, 17 significant digits.
void save_model(const std::filesystem::path& path,
                const EmbeddingModel<double>& model);
EmbeddingModel<double> load_model(const std::filesystem::path& path);

// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

// Writes `contents` to `path`, throwing IoError with the path on failure.
void write_text(const std::filesystem::path& path, std::string_view contents);

}  // namespace vseens
