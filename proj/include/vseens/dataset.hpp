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

#include <vseens/model.hpp>

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace vseens {

struct Pair {
  Index image = 0;
  Index annotation = 0;

  auto operator<=>(const Pair&) const = default;
};

/// One SGD event: image, a positive annotation and a sampled negative.
struct Triplet {
  Index image = 0;
  Index positive = 0;
  Index negative = 0;

  bool operator==(const Triplet&) const = default;
};

/// Positive image-annotation pairs over dense indices. Every image has at
/// least one positive; `positives(i)` is the sorted set view of `pairs()`.
class Dataset {
 public:
  Dataset() = default;

  // Validates indices, drops duplicate pairs (keeping first occurrence order)
  // and builds the per-image positive sets. Throws ConfigError on empty input,
  // out-of-range indices or an image without positives.
  static Dataset from_pairs(Index num_images, Index num_annotations,
                            std::vector<Pair> pairs,
                            std::size_t* duplicates = nullptr);

  Index num_images() const { return num_images_; }
  Index num_annotations() const { return num_annotations_; }
  std::size_t size() const { return pairs_.size(); }

  std::span<const Pair> pairs() const { return pairs_; }
  std::span<const Index> positives(Index image) const;
  bool is_positive(Index image, Index annotation) const;

  // Number of annotations not attached to `image`.
  Index num_negatives(Index image) const;

  // The n-th (0-based, ascending) annotation not attached to `image`.
  Index nth_negative(Index image, Index n) const;

  bool operator==(const Dataset&) const = default;

 private:
  Index num_images_ = 0;
  Index num_annotations_ = 0;
  std::vector<Pair> pairs_;
  std::vector<std::vector<Index>> positives_;
};

}  // namespace vseens
