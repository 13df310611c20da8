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

#include <vseens/dataset.hpp>
#include <vseens/errors.hpp>

#include <algorithm>
#include <set>
#include <string>

namespace vseens {

Dataset Dataset::from_pairs(Index num_images, Index num_annotations,
                            std::vector<Pair> pairs, std::size_t* duplicates) {
  if (pairs.empty()) {
    throw ConfigError("dataset has no pairs");
  }
  if (num_images < 1 || num_annotations < 1) {
    throw ConfigError("dataset needs at least one image and one annotation");
  }

  Dataset ds;
  ds.num_images_ = num_images;
  ds.num_annotations_ = num_annotations;
  ds.positives_.resize(static_cast<std::size_t>(num_images));

  std::set<Pair> seen;
  std::size_t dups = 0;
  ds.pairs_.reserve(pairs.size());
  for (const Pair& p : pairs) {
    if (p.image < 0 || p.image >= num_images || p.annotation < 0 ||
        p.annotation >= num_annotations) {
      throw ConfigError("pair (" + std::to_string(p.image) + ", " +
                        std::to_string(p.annotation) + ") out of range");
    }
    if (!seen.insert(p).second) {
      ++dups;
      continue;
    }
    ds.pairs_.push_back(p);
    ds.positives_[static_cast<std::size_t>(p.image)].push_back(p.annotation);
  }
  for (std::size_t i = 0; i < ds.positives_.size(); ++i) {
    auto& pos = ds.positives_[i];
    if (pos.empty()) {
      throw ConfigError("image " + std::to_string(i) + " has no positive pair");
    }
    std::sort(pos.begin(), pos.end());
  }
  if (duplicates) {
    *duplicates = dups;
  }
  return ds;
}

std::span<const Index> Dataset::positives(Index image) const {
  if (image < 0 || image >= num_images_) {
    throw std::out_of_range("image index " + std::to_string(image) +
                            " out of range");
  }
  return positives_[static_cast<std::size_t>(image)];
}

bool Dataset::is_positive(Index image, Index annotation) const {
  const auto pos = positives(image);
  return std::binary_search(pos.begin(), pos.end(), annotation);
}

Index Dataset::num_negatives(Index image) const {
  return num_annotations_ - static_cast<Index>(positives(image).size());
}

Index Dataset::nth_negative(Index image, Index n) const {
  if (n < 0 || n >= num_negatives(image)) {
    throw std::out_of_range("negative rank out of range");
  }
  // Shift past every positive at or below the running candidate.
  Index candidate = n;
  for (Index p : positives(image)) {
    if (p <= candidate) {
      ++candidate;
    } else {
      break;
    }
  }
  return candidate;
}

}  // namespace vseens
