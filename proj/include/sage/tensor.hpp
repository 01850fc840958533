/*
 * Copyright 2026 The SAGE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Dense row-major containers for image embeddings, text embeddings and the
// image x template x class similarity tensor. All three own their storage
// and expose read-only spans over rows.

#ifndef SAGE_TENSOR_HPP_
#define SAGE_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace sage {

// N x D image representations, one row per sample.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> data;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows_, std::size_t dim_)
      : rows(rows_), dim(dim_), data(rows_ * dim_, 0.0f) {}

  std::span<const float> row(std::size_t n) const {
    return {data.data() + n * dim, dim};
  }
  std::span<float> row(std::size_t n) { return {data.data() + n * dim, dim}; }

  bool operator==(const EmbeddingMatrix&) const = default;
};

// M x C x D text representations: template-major, class-minor.
struct TextEmbeddingTensor {
  std::size_t templates = 0;
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<float> data;

  TextEmbeddingTensor() = default;
  TextEmbeddingTensor(std::size_t templates_, std::size_t classes_,
                      std::size_t dim_)
      : templates(templates_),
        classes(classes_),
        dim(dim_),
        data(templates_ * classes_ * dim_, 0.0f) {}

  std::span<const float> at(std::size_t j, std::size_t i) const {
    return {data.data() + (j * classes + i) * dim, dim};
  }
  std::span<float> at(std::size_t j, std::size_t i) {
    return {data.data() + (j * classes + i) * dim, dim};
  }

  bool operator==(const TextEmbeddingTensor&) const = default;
};

// N x M x C cosine similarities; entry (n, j, i) compares image n with the
// text of class i under template j.
struct SimilarityTensor {
  std::size_t images = 0;
  std::size_t templates = 0;
  std::size_t classes = 0;
  std::vector<float> data;

  SimilarityTensor() = default;
  SimilarityTensor(std::size_t images_, std::size_t templates_,
                   std::size_t classes_)
      : images(images_),
        templates(templates_),
        classes(classes_),
        data(images_ * templates_ * classes_, 0.0f) {}

  float operator()(std::size_t n, std::size_t j, std::size_t i) const {
    return data[(n * templates + j) * classes + i];
  }
  float& operator()(std::size_t n, std::size_t j, std::size_t i) {
    return data[(n * templates + j) * classes + i];
  }

  // Class scores of image n under template j.
  std::span<const float> scores(std::size_t n, std::size_t j) const {
    return {data.data() + (n * templates + j) * classes, classes};
  }

  bool operator==(const SimilarityTensor&) const = default;
};

}  // namespace sage

#endif  // SAGE_TENSOR_HPP_
