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

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vseens {

using Index = Eigen::Index;

/// Joint embedding of images and annotations. Images are ID-only, so the
/// image map is a plain row lookup into `image_factors`; annotations are rows
/// of `annotation_factors`. Both matrices are row-major so a factor vector is
/// contiguous.
template <typename Scalar>
class EmbeddingModel {
 public:
  using Matrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  EmbeddingModel() = default;

  EmbeddingModel(Index num_images, Index num_annotations, Index dim)
    : images_(Matrix::Zero(num_images, dim)),
      annotations_(Matrix::Zero(num_annotations, dim)) {
    if (num_images < 0 || num_annotations < 0 || dim < 1) {
      throw std::invalid_argument("EmbeddingModel: invalid shape");
    }
  }

  EmbeddingModel(Matrix images, Matrix annotations)
    : images_(std::move(images)), annotations_(std::move(annotations)) {
    if (images_.cols() != annotations_.cols() || images_.cols() < 1) {
      throw std::invalid_argument(
        "EmbeddingModel: image and annotation factors must share k >= 1");
    }
  }

  Index num_images() const { return images_.rows(); }
  Index num_annotations() const { return annotations_.rows(); }
  Index dim() const { return images_.cols(); }

  const Matrix& image_factors() const { return images_; }
  const Matrix& annotation_factors() const { return annotations_; }

  auto image(Index i) const { return images_.row(check_image(i)); }
  auto image(Index i) { return images_.row(check_image(i)); }
  auto annotation(Index a) const { return annotations_.row(check_annotation(a)); }
  auto annotation(Index a) { return annotations_.row(check_annotation(a)); }

  // Overwrites every entry with gen(); used for random initialization.
  template <typename Generator>
  void fill(Generator&& gen) {
    images_ = images_.unaryExpr([&](Scalar) { return Scalar(gen()); });
    annotations_ = annotations_.unaryExpr([&](Scalar) { return Scalar(gen()); });
  }

  bool all_finite() const {
    return images_.allFinite() && annotations_.allFinite();
  }

  bool operator==(const EmbeddingModel& other) const {
    return images_.rows() == other.images_.rows() &&
           annotations_.rows() == other.annotations_.rows() &&
           dim() == other.dim() && images_ == other.images_ &&
           annotations_ == other.annotations_;
  }

 private:
  Index check_image(Index i) const {
    if (i < 0 || i >= images_.rows()) {
      throw std::out_of_range("image index " + std::to_string(i) +
                              " out of range");
    }
    return i;
  }

  Index check_annotation(Index a) const {
    if (a < 0 || a >= annotations_.rows()) {
      throw std::out_of_range("annotation index " + std::to_string(a) +
                              " out of range");
    }
    return a;
  }

  Matrix images_;
  Matrix annotations_;
};

/// Per-dimension mean and population standard deviation of the annotation
/// factors, taken at draw counter `drawn_at`.
template <typename Scalar>
struct FactorStats {
  using Vector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  Vector mu;
  Vector sigma;
  std::uint64_t drawn_at = 0;
};

// sgn with sgn(0) = +1.
template <typename Scalar>
constexpr Scalar sign(Scalar x) {
  return x < Scalar(0) ? Scalar(-1) : Scalar(1);
}

template <typename Scalar>
Scalar score(const EmbeddingModel<Scalar>& model, Index image, Index annotation) {
  return model.image(image).dot(model.annotation(annotation));
}

template <typename Scalar>
FactorStats<Scalar> compute_factor_stats(const EmbeddingModel<Scalar>& model,
                                         std::uint64_t drawn_at = 0) {
  const auto& factors = model.annotation_factors();
  if (factors.rows() < 1) {
    throw std::invalid_argument("compute_factor_stats: no annotations");
  }
  FactorStats<Scalar> stats;
  stats.mu = factors.colwise().mean();
  stats.sigma = ((factors.rowwise() - stats.mu).array().square().colwise().sum() /
                 Scalar(factors.rows()))
                  .sqrt()
                  .matrix();
  stats.drawn_at = drawn_at;
  return stats;
}

/// Standardized score: sum_f p(f|i) sgn(v_if) v*_af with p(f|i) = |v_if| sigma_f
/// and v*_af = (v_af - mu_f) / sigma_f. Differs from score() by a constant
/// that depends only on the image, so both induce the same annotation order.
/// Dimensions with sigma_f = 0 contribute nothing.
template <typename Scalar>
Scalar transformed_score(const EmbeddingModel<Scalar>& model,
                         const FactorStats<Scalar>& stats, Index image,
                         Index annotation) {
  const auto v_i = model.image(image);
  const auto v_a = model.annotation(annotation);
  Scalar total(0);
  for (Index f = 0; f < model.dim(); ++f) {
    const Scalar s = stats.sigma[f];
    if (s == Scalar(0)) {
      continue;
    }
    const Scalar weight = std::abs(v_i[f]) * s;
    const Scalar standardized = (v_a[f] - stats.mu[f]) / s;
    total += weight * sign(v_i[f]) * standardized;
  }
  return total;
}

}  // namespace vseens
