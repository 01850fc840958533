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

// Brute-force reference implementations used only by the tests. Each one is
// written as the most direct loop over the definition and shares no code
// with the library beyond the container types.

#ifndef SAGE_TESTS_ORACLE_HPP_
#define SAGE_TESTS_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "sage/tensor.hpp"

namespace oracle {

// cos(a, b) with sequential double sums, one rounding to float, clamped.
inline float cosine(const float* a, const float* b, std::size_t d) {
  double aa = 0.0, bb = 0.0, ab = 0.0;
  for (std::size_t k = 0; k < d; ++k) aa += double(a[k]) * double(a[k]);
  for (std::size_t k = 0; k < d; ++k) bb += double(b[k]) * double(b[k]);
  for (std::size_t k = 0; k < d; ++k) ab += double(a[k]) * double(b[k]);
  float c = float(ab / (std::sqrt(aa) * std::sqrt(bb)));
  if (c > 1.0f) c = 1.0f;
  if (c < -1.0f) c = -1.0f;
  return c;
}

// sim[n][j][i]
using Cube = std::vector<std::vector<std::vector<float>>>;

inline Cube similarity(const sage::EmbeddingMatrix& images, const sage::TextEmbeddingTensor& texts) {
  Cube out(images.rows, std::vector<std::vector<float>>(texts.templates,
                                                         std::vector<float>(texts.classes)));
  for (std::size_t n = 0; n < images.rows; ++n)
    for (std::size_t j = 0; j < texts.templates; ++j)
      for (std::size_t i = 0; i < texts.classes; ++i)
        out[n][j][i] = cosine(&images.data[n * images.dim],
                              &texts.data[(j * texts.classes + i) * texts.dim], images.dim);
  return out;
}

inline std::vector<std::vector<float>> separation(const Cube& sim) {
  std::vector<std::vector<float>> out;
  for (const auto& image : sim) {
    std::vector<float> row;
    for (const auto& scores : image) {
      float hi = scores[0], lo = scores[0];
      for (float s : scores) {
        if (s > hi) hi = s;
        if (s < lo) lo = s;
      }
      row.push_back(hi - lo);
    }
    out.push_back(row);
  }
  return out;
}

// Full sort on (-score, index), then truncate.
inline std::vector<std::vector<int>> topk(const std::vector<std::vector<float>>& sep, std::size_t k) {
  std::vector<std::vector<int>> out;
  for (const auto& row : sep) {
    std::vector<std::pair<float, int>> keyed;
    for (std::size_t j = 0; j < row.size(); ++j) keyed.emplace_back(-row[j], int(j));
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> chosen;
    for (std::size_t r = 0; r < k; ++r) chosen.push_back(keyed[r].second);
    out.push_back(chosen);
  }
  return out;
}

// Mean over `templates` (summed in ascending index order), then the first
// index attaining the maximum.
inline int average_argmax(const std::vector<std::vector<float>>& image, std::vector<int> templates) {
  std::sort(templates.begin(), templates.end());
  const std::size_t classes = image[0].size();
  std::vector<double> mean(classes, 0.0);
  for (int j : templates)
    for (std::size_t i = 0; i < classes; ++i) mean[i] += double(image[j][i]);
  for (double& m : mean) m /= double(templates.size());
  int best = 0;
  for (std::size_t i = 1; i < classes; ++i)
    if (mean[i] > mean[best]) best = int(i);
  return best;
}

inline std::vector<int> predict_with(const Cube& sim, const std::vector<std::vector<int>>& chosen) {
  std::vector<int> out;
  for (std::size_t n = 0; n < sim.size(); ++n) out.push_back(average_argmax(sim[n], chosen[n]));
  return out;
}

inline std::vector<int> predict_vanilla(const Cube& sim, int j) {
  std::vector<int> out;
  for (const auto& image : sim) out.push_back(average_argmax(image, {j}));
  return out;
}

inline std::vector<int> predict_ensemble(const Cube& sim) {
  std::vector<int> all;
  for (std::size_t j = 0; j < sim[0].size(); ++j) all.push_back(int(j));
  std::vector<int> out;
  for (const auto& image : sim) out.push_back(average_argmax(image, all));
  return out;
}

// Group accuracies by direct counting; -1 marks an empty group.
struct Eval {
  double avg = 0.0;
  double wga = 0.0;
  std::vector<double> group_acc;
};

inline Eval evaluate(const std::vector<int>& pred, const std::vector<int>& y,
                     const std::vector<int>& g, int groups) {
  Eval e;
  int correct = 0;
  for (std::size_t n = 0; n < pred.size(); ++n) correct += pred[n] == y[n];
  e.avg = double(correct) / double(pred.size());
  e.wga = 2.0;
  for (int k = 0; k < groups; ++k) {
    int count = 0, hits = 0;
    for (std::size_t n = 0; n < pred.size(); ++n) {
      if (g[n] != k) continue;
      ++count;
      hits += pred[n] == y[n];
    }
    if (count == 0) {
      e.group_acc.push_back(-1.0);
      continue;
    }
    e.group_acc.push_back(double(hits) / double(count));
    e.wga = std::min(e.wga, e.group_acc.back());
  }
  return e;
}

}  // namespace oracle

#endif  // SAGE_TESTS_ORACLE_HPP_
