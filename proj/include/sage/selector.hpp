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

// Spuriousness-aware template selection and the zero-shot predictors built
// on the similarity tensor.
//
// For image n and template j the separation score is the spread of the class
// similarities, max_i sim(n, j, i) - min_i sim(n, j, i). Per image, the K
// templates with the largest score are kept and their class similarities are
// averaged before the argmax.
//
// Determinism rules shared by every predictor:
//   * argmax ties go to the lowest class index;
//   * top-K ties on the score go to the lowest template index;
//   * averages are summed in ascending template order, so selecting all M
//     templates reproduces the full ensemble bit for bit.

#ifndef SAGE_SELECTOR_HPP_
#define SAGE_SELECTOR_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sage/error.hpp"
#include "sage/parallel.hpp"
#include "sage/rng.hpp"
#include "sage/tensor.hpp"

namespace sage {

// N x M separation scores.
struct SeparationScores {
  std::size_t images = 0;
  std::size_t templates = 0;
  std::vector<float> data;

  float operator()(std::size_t n, std::size_t j) const { return data[n * templates + j]; }
  std::span<const float> row(std::size_t n) const {
    return {data.data() + n * templates, templates};
  }

  bool operator==(const SeparationScores&) const = default;
};

// Per image, k template indices in descending score order plus their scores.
struct Selection {
  std::size_t images = 0;
  std::size_t k = 0;
  std::vector<int> templates;
  std::vector<float> scores;

  std::span<const int> row(std::size_t n) const { return {templates.data() + n * k, k}; }

  bool operator==(const Selection&) const = default;
};

enum class VariantKind { kSage, kVanilla, kEnsemble, kRandom };

// How the random baseline draws: k templates per image, or one set of k
// templates shared by the whole dataset within a run.
enum class RandomScope { kImage, kDataset };

struct Variant {
  VariantKind kind = VariantKind::kSage;
  std::size_t k = 1;
  int template_index = -1;
  std::uint64_t seed = 0;
  int run = 0;
  RandomScope scope = RandomScope::kImage;

  // Compact tag without commas, safe as a CSV field.
  std::string tag() const {
    switch (kind) {
      case VariantKind::kSage:
        return "sage:k=" + std::to_string(k);
      case VariantKind::kVanilla:
        return "vanilla:t=" + std::to_string(template_index);
      case VariantKind::kEnsemble:
        return "ensemble";
      case VariantKind::kRandom:
        return "random:k=" + std::to_string(k) + ":seed=" + std::to_string(seed) +
               ":run=" + std::to_string(run) +
               (scope == RandomScope::kDataset ? ":scope=dataset" : "");
    }
    return "unknown";
  }

  bool operator==(const Variant&) const = default;
};

struct PredictionSet {
  Variant variant;
  std::size_t images = 0;
  std::size_t classes = 0;
  std::size_t templates_per_image = 0;
  std::vector<int> predicted;       // y_hat per image
  std::vector<double> scores;       // images x classes averaged similarities
  std::vector<int> used_templates;  // images x templates_per_image

  std::span<const double> class_scores(std::size_t n) const {
    return {scores.data() + n * classes, classes};
  }
  std::span<const int> templates_of(std::size_t n) const {
    return {used_templates.data() + n * templates_per_image, templates_per_image};
  }

  bool operator==(const PredictionSet&) const = default;
};

// Lowest index among the maxima.
template <typename T>
int argmax_lowest(std::span<const T> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<int>(best);
}

inline SeparationScores separation_scores(const SimilarityTensor& sim, std::size_t workers) {
  SeparationScores out{sim.images, sim.templates,
                       std::vector<float>(sim.images * sim.templates, 0.0f)};
  if (sim.classes == 0) return out;
  parallel_for(sim.images, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      for (std::size_t j = 0; j < sim.templates; ++j) {
        const auto [lo, hi] = std::minmax_element(sim.scores(n, j).begin(),
                                                  sim.scores(n, j).end());
        out.data[n * sim.templates + j] = *hi - *lo;
      }
    }
  });
  return out;
}

inline SeparationScores separation_scores(const SimilarityTensor& sim) {
  return separation_scores(sim, worker_count());
}

inline Selection select_topk(const SeparationScores& scores, std::size_t k,
                             std::size_t workers) {
  if (k < 1 || k > scores.templates) {
    fail(ErrorCode::kKOutOfRange, "select_topk: k=" + std::to_string(k) +
                                      " outside [1, " + std::to_string(scores.templates) + "]");
  }
  Selection sel{scores.images, k, std::vector<int>(scores.images * k),
                std::vector<float>(scores.images * k)};
  parallel_for(scores.images, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<int> order(scores.templates);
    for (std::size_t n = begin; n < end; ++n) {
      const auto row = scores.row(n);
      std::iota(order.begin(), order.end(), 0);
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                        order.end(), [&](int a, int b) {
                          if (row[a] != row[b]) return row[a] > row[b];
                          return a < b;
                        });
      for (std::size_t r = 0; r < k; ++r) {
        sel.templates[n * k + r] = order[r];
        sel.scores[n * k + r] = row[order[r]];
      }
    }
  });
  return sel;
}

inline Selection select_topk(const SeparationScores& scores, std::size_t k) {
  return select_topk(scores, k, worker_count());
}

namespace detail {

inline PredictionSet make_prediction_set(const SimilarityTensor& sim, Variant variant,
                                         std::size_t per_image) {
  PredictionSet p;
  p.variant = variant;
  p.images = sim.images;
  p.classes = sim.classes;
  p.templates_per_image = per_image;
  p.predicted.assign(sim.images, 0);
  p.scores.assign(sim.images * sim.classes, 0.0);
  p.used_templates.assign(sim.images * per_image, 0);
  return p;
}

// Averages class similarities of image n over `chosen` (any order) and
// stores the scores and the argmax.
inline void average_and_predict(const SimilarityTensor& sim, std::size_t n,
                                std::span<const int> chosen, std::vector<int>& scratch,
                                PredictionSet& out) {
  scratch.assign(chosen.begin(), chosen.end());
  std::sort(scratch.begin(), scratch.end());
  std::span<double> scores(out.scores.data() + n * sim.classes, sim.classes);
  std::fill(scores.begin(), scores.end(), 0.0);
  for (int j : scratch) {
    const auto row = sim.scores(n, static_cast<std::size_t>(j));
    for (std::size_t i = 0; i < sim.classes; ++i) scores[i] += static_cast<double>(row[i]);
  }
  const auto count = static_cast<double>(scratch.size());
  for (double& s : scores) s /= count;
  out.predicted[n] = argmax_lowest<double>(scores);
}

inline void check_template_count(const SimilarityTensor& sim, std::size_t k) {
  if (k < 1 || k > sim.templates) {
    fail(ErrorCode::kKOutOfRange, "k=" + std::to_string(k) + " outside [1, " +
                                      std::to_string(sim.templates) + "]");
  }
}

}  // namespace detail

inline PredictionSet predict_sage(const SimilarityTensor& sim, const Selection& selection,
                                  std::size_t workers) {
  if (selection.images != sim.images) {
    fail(ErrorCode::kShapeMismatch, "predict_sage: selection covers " +
                                        std::to_string(selection.images) + " images, tensor has " +
                                        std::to_string(sim.images));
  }
  for (int j : selection.templates) {
    if (j < 0 || static_cast<std::size_t>(j) >= sim.templates) {
      fail(ErrorCode::kShapeMismatch, "predict_sage: selection references template " +
                                          std::to_string(j) + " of " +
                                          std::to_string(sim.templates));
    }
  }
  Variant variant;
  variant.kind = VariantKind::kSage;
  variant.k = selection.k;
  PredictionSet out = detail::make_prediction_set(sim, variant, selection.k);
  std::copy(selection.templates.begin(), selection.templates.end(),
            out.used_templates.begin());
  parallel_for(sim.images, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<int> scratch;
    for (std::size_t n = begin; n < end; ++n) {
      detail::average_and_predict(sim, n, selection.row(n), scratch, out);
    }
  });
  return out;
}

inline PredictionSet predict_sage(const SimilarityTensor& sim, const Selection& selection) {
  return predict_sage(sim, selection, worker_count());
}

// Convenience: score, select the top k and predict in one call.
inline PredictionSet predict_sage(const SimilarityTensor& sim, std::size_t k,
                                  std::size_t workers) {
  detail::check_template_count(sim, k);
  return predict_sage(sim, select_topk(separation_scores(sim, workers), k, workers), workers);
}

inline PredictionSet predict_vanilla(const SimilarityTensor& sim, int template_index) {
  if (template_index < 0 || static_cast<std::size_t>(template_index) >= sim.templates) {
    fail(ErrorCode::kIndexOutOfRange, "predict_vanilla: template " +
                                          std::to_string(template_index) + " outside [0, " +
                                          std::to_string(sim.templates) + ")");
  }
  Variant variant;
  variant.kind = VariantKind::kVanilla;
  variant.template_index = template_index;
  PredictionSet out = detail::make_prediction_set(sim, variant, 1);
  const std::array<int, 1> chosen = {template_index};
  std::vector<int> scratch;
  for (std::size_t n = 0; n < sim.images; ++n) {
    out.used_templates[n] = template_index;
    detail::average_and_predict(sim, n, chosen, scratch, out);
  }
  return out;
}

inline PredictionSet predict_ensemble(const SimilarityTensor& sim, std::size_t workers) {
  Variant variant;
  variant.kind = VariantKind::kEnsemble;
  variant.k = sim.templates;
  PredictionSet out = detail::make_prediction_set(sim, variant, sim.templates);
  std::vector<int> all(sim.templates);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t n = 0; n < sim.images; ++n) {
    std::copy(all.begin(), all.end(),
              out.used_templates.begin() + static_cast<std::ptrdiff_t>(n * sim.templates));
  }
  parallel_for(sim.images, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<int> scratch;
    for (std::size_t n = begin; n < end; ++n) {
      detail::average_and_predict(sim, n, all, scratch, out);
    }
  });
  return out;
}

inline PredictionSet predict_ensemble(const SimilarityTensor& sim) {
  return predict_ensemble(sim, worker_count());
}

// Stream key used by the dataset-scope random baseline in place of an image
// index.
inline constexpr std::uint64_t kDatasetStreamKey = ~std::uint64_t{0};

// k distinct template indices drawn uniformly from [0, m) by a partial
// Fisher-Yates shuffle, in draw order.
inline std::vector<int> draw_templates(std::uint64_t stream_seed, std::size_t m,
                                       std::size_t k) {
  Xoshiro256pp rng(stream_seed);
  std::vector<int> pool(m);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t pick = t + static_cast<std::size_t>(rng.below(m - t));
    std::swap(pool[t], pool[pick]);
  }
  pool.resize(k);
  return pool;
}

// One PredictionSet per run. Run r, image n uses the substream
// derive_seed(seed, r, n), so results are independent of scheduling.
inline std::vector<PredictionSet> predict_random(const SimilarityTensor& sim, std::size_t k,
                                                 std::uint64_t seed, int runs,
                                                 RandomScope scope, std::size_t workers) {
  detail::check_template_count(sim, k);
  if (runs < 1) fail(ErrorCode::kConfigError, "predict_random: runs must be >= 1");
  std::vector<PredictionSet> out;
  out.reserve(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) {
    Variant variant;
    variant.kind = VariantKind::kRandom;
    variant.k = k;
    variant.seed = seed;
    variant.run = r;
    variant.scope = scope;
    PredictionSet p = detail::make_prediction_set(sim, variant, k);
    const auto run_key = static_cast<std::uint64_t>(r);
    const std::vector<int> shared =
        scope == RandomScope::kDataset
            ? draw_templates(derive_seed(seed, run_key, kDatasetStreamKey), sim.templates, k)
            : std::vector<int>{};
    parallel_for(sim.images, workers, [&](std::size_t begin, std::size_t end) {
      std::vector<int> scratch;
      for (std::size_t n = begin; n < end; ++n) {
        const std::vector<int> chosen =
            scope == RandomScope::kDataset
                ? shared
                : draw_templates(derive_seed(seed, run_key, n), sim.templates, k);
        std::copy(chosen.begin(), chosen.end(),
                  p.used_templates.begin() + static_cast<std::ptrdiff_t>(n * k));
        detail::average_and_predict(sim, n, chosen, scratch, p);
      }
    });
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<PredictionSet> predict_random(const SimilarityTensor& sim, std::size_t k,
                                                 std::uint64_t seed, int runs,
                                                 RandomScope scope = RandomScope::kImage) {
  return predict_random(sim, k, seed, runs, scope, worker_count());
}

}  // namespace sage

#endif  // SAGE_SELECTOR_HPP_
