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

#include <cmath>
#include <initializer_list>
#include <random>
#include <vector>

namespace vseens::testing {

using RowList = std::initializer_list<std::initializer_list<double>>;

inline EmbeddingModel<double>::Matrix rows(RowList list) {
  const Index n = static_cast<Index>(list.size());
  const Index k = n == 0 ? 0 : static_cast<Index>(list.begin()->size());
  EmbeddingModel<double>::Matrix m(n, k);
  Index r = 0;
  for (const auto& row : list) {
    Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline EmbeddingModel<double> make_model(RowList images, RowList annotations) {
  return EmbeddingModel<double>(rows(images), rows(annotations));
}

inline EmbeddingModel<double> random_model(Index images, Index annotations, Index k,
                                           std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  EmbeddingModel<double> model(images, annotations, k);
  model.fill([&] { return normal(rng); });
  return model;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) tv += std::abs(p[j] - q[j]);
  return 0.5 * tv;
}

inline std::vector<double> normalize(std::vector<double> counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  for (double& c : counts) c /= total;
  return counts;
}

}  // namespace vseens::testing
