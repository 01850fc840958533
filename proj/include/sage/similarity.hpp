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

// Cosine similarity between image and text embeddings.
//
// Every cosine is evaluated as dot(a, b) / (|a| * |b|) with all sums
// accumulated sequentially in double, then rounded once to float and clamped
// to [-1, 1]. Because the reduction order inside one cosine is fixed, the
// similarity tensor is bit-identical for any partition of image rows across
// workers. Scaling an input by a power of two is exact in floating point and
// therefore leaves the tensor bit-identical as well.

#ifndef SAGE_SIMILARITY_HPP_
#define SAGE_SIMILARITY_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sage/error.hpp"
#include "sage/parallel.hpp"
#include "sage/tensor.hpp"

namespace sage {

// Euclidean norm with double accumulation.
inline double norm64(std::span<const float> v) {
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(sum);
}

inline double dot64(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  }
  return sum;
}

// A vector is zero-norm iff its double-accumulated norm is exactly 0, so
// tiny-but-nonzero float vectors such as (1e-20, 0, ...) still normalize.
inline std::vector<float> normalize(std::span<const float> v) {
  const double norm = norm64(v);
  if (norm == 0.0) fail(ErrorCode::kZeroNorm, "normalize: zero-norm vector");
  std::vector<float> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = static_cast<float>(static_cast<double>(v[k]) / norm);
  }
  return out;
}

namespace detail {

inline float cosine_from_parts(double dot, double norm_a, double norm_b) {
  const auto value = static_cast<float>(dot / (norm_a * norm_b));
  return std::clamp(value, -1.0f, 1.0f);
}

}  // namespace detail

inline float cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kShapeMismatch, "cosine: dimension " + std::to_string(a.size()) +
                                        " vs " + std::to_string(b.size()));
  }
  const double norm_a = norm64(a);
  const double norm_b = norm64(b);
  if (norm_a == 0.0 || norm_b == 0.0) {
    fail(ErrorCode::kZeroNorm, "cosine: zero-norm argument");
  }
  return detail::cosine_from_parts(dot64(a, b), norm_a, norm_b);
}

inline SimilarityTensor compute_similarity_tensor(const EmbeddingMatrix& images,
                                                  const TextEmbeddingTensor& texts,
                                                  std::size_t workers) {
  if (images.dim != texts.dim) {
    fail(ErrorCode::kShapeMismatch,
         "similarity: image dim " + std::to_string(images.dim) + " vs text dim " +
             std::to_string(texts.dim));
  }
  const std::size_t pairs = texts.templates * texts.classes;
  std::vector<double> text_norms(pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    text_norms[p] = norm64(texts.at(p / texts.classes, p % texts.classes));
    if (text_norms[p] == 0.0) {
      fail(ErrorCode::kZeroNorm, "similarity: zero-norm text embedding (template " +
                                     std::to_string(p / texts.classes) + ", class " +
                                     std::to_string(p % texts.classes) + ")");
    }
  }

  SimilarityTensor sim(images.rows, texts.templates, texts.classes);
  parallel_for(images.rows, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      const auto image = images.row(n);
      const double image_norm = norm64(image);
      if (image_norm == 0.0) {
        fail(ErrorCode::kZeroNorm, "similarity: zero-norm image row " + std::to_string(n));
      }
      for (std::size_t p = 0; p < pairs; ++p) {
        const std::size_t j = p / texts.classes;
        const std::size_t i = p % texts.classes;
        sim(n, j, i) =
            detail::cosine_from_parts(dot64(image, texts.at(j, i)), image_norm, text_norms[p]);
      }
    }
  });
  return sim;
}

inline SimilarityTensor compute_similarity_tensor(const EmbeddingMatrix& images,
                                                  const TextEmbeddingTensor& texts) {
  return compute_similarity_tensor(images, texts, worker_count());
}

}  // namespace sage

#endif  // SAGE_SIMILARITY_HPP_
