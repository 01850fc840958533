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

// Synthetic embedding worlds with a controllable spurious direction.
//
// Geometry, with core_i (one per class), spur and jitter directions all
// pairwise orthonormal:
//
//   text(j, 0) = normalize((1 - b_j) * core_0 + b_j * spur)
//   text(j, i) = normalize((1 - b_j * (1 - r)) * core_i + b_j * spur)
//                + jitter * e(j, i)                           for i >= 1
//   image, class i, spurious group = normalize((1 - a) * core_i + a * spur)
//                                    + noise * N(0, I)
//   image, class i, clean group    = core_i + noise * N(0, I)
//
// b_j is the template's bias strength, a the spurious image weight and r the
// core retention of the non-target classes. With r = 0 a biased template
// pulls every class text onto spur, which gives it the widest margin and
// defeats the construction; r > 0 keeps the other classes anchored to their
// cores so the biased template is the one with the collapsed margin.
//
// Every draw comes from one Xoshiro256pp stream seeded with config.seed: the
// basis first (row by row, d normals per direction), then the image noise in
// sample order. Group 2i holds spurious-present samples of class i and group
// 2i + 1 the spurious-absent ones.

#ifndef SAGE_SYNTH_HPP_
#define SAGE_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sage/bundle.hpp"
#include "sage/error.hpp"
#include "sage/prompts.hpp"
#include "sage/rng.hpp"
#include "sage/selector.hpp"
#include "sage/similarity.hpp"
#include "sage/tensor.hpp"

namespace sage {

struct SynthConfig {
  std::size_t d = 64;
  std::size_t n_per_group = 100;
  std::size_t c = 2;
  std::vector<double> bias_strengths = {1.0, 0.0};  // one per template
  double spurious_image_weight = 0.95;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  double core_retention = 0.12;
  double jitter = 0.05;

  std::size_t m() const { return bias_strengths.size(); }
  bool operator==(const SynthConfig&) const = default;
};

struct SynthWorld {
  SynthConfig config;
  Bundle bundle;
  std::vector<std::vector<double>> core;    // c x d
  std::vector<double> spur;                 // d
  std::vector<std::vector<double>> jitter;  // extra directions, each d
};

inline SynthConfig synth_preset(std::string_view name) {
  SynthConfig cfg;
  if (name == "theorem") {
    cfg.bias_strengths = {1.0, 0.0};
    cfg.spurious_image_weight = 0.95;
    cfg.noise_sigma = 0.0;
  } else if (name == "ladder") {
    cfg.bias_strengths = {0.0, 0.25, 0.5, 0.75, 1.0};
    cfg.spurious_image_weight = 0.9;
    cfg.noise_sigma = 0.02;
  } else if (name == "clean") {
    cfg.bias_strengths = {0.0, 0.0, 0.0};
    cfg.spurious_image_weight = 0.0;
    cfg.noise_sigma = 0.05;
  } else {
    fail(ErrorCode::kConfigError,
         "unknown preset '" + std::string(name) + "' (expected theorem, ladder or clean)");
  }
  return cfg;
}

inline void validate_synth_config(const SynthConfig& cfg) {
  const auto reject = [](const std::string& what) { fail(ErrorCode::kConfigError, "synth: " + what); };
  if (cfg.c < 2) reject("c must be >= 2");
  if (cfg.d < cfg.c + 2) {
    reject("d=" + std::to_string(cfg.d) + " leaves no room for " + std::to_string(cfg.c) +
           " core directions, spur and jitter (need d >= c + 2)");
  }
  if (cfg.m() < 1) reject("need at least one bias strength");
  if (cfg.m() > kTemplateBank.size()) {
    reject("at most " + std::to_string(kTemplateBank.size()) + " templates");
  }
  for (double b : cfg.bias_strengths) {
    if (!(b >= 0.0 && b <= 1.0)) reject("bias strengths must lie in [0, 1]");
  }
  if (!(cfg.spurious_image_weight >= 0.0 && cfg.spurious_image_weight < 1.0)) {
    reject("spurious_image_weight must lie in [0, 1)");
  }
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) {
    reject("noise_sigma must be finite and >= 0");
  }
  if (!(cfg.core_retention >= 0.0 && cfg.core_retention <= 1.0)) {
    reject("core_retention must lie in [0, 1]");
  }
  if (!(cfg.jitter >= 0.0) || !std::isfinite(cfg.jitter)) reject("jitter must be >= 0");
}

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline void scale_to_unit(std::vector<double>& v) {
  const double norm = std::sqrt(dot(v, v));
  if (norm == 0.0) fail(ErrorCode::kInvariantViolation, "synth: degenerate random direction");
  for (double& x : v) x /= norm;
}

// Gram-Schmidt with a second pass, then a check to 1e-6.
inline std::vector<std::vector<double>> orthonormal_basis(std::size_t count, std::size_t d,
                                                          Xoshiro256pp& rng) {
  std::vector<std::vector<double>> basis;
  basis.reserve(count);
  for (std::size_t a = 0; a < count; ++a) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double proj = dot(v, q);
        for (std::size_t k = 0; k < d; ++k) v[k] -= proj * q[k];
      }
    }
    scale_to_unit(v);
    basis.push_back(std::move(v));
  }
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a; b < count; ++b) {
      const double expected = a == b ? 1.0 : 0.0;
      if (std::abs(dot(basis[a], basis[b]) - expected) > 1e-6) {
        fail(ErrorCode::kInvariantViolation, "synth: basis not orthonormal");
      }
    }
  }
  return basis;
}

inline std::vector<double> mix(double wa, const std::vector<double>& a, double wb,
                               const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = wa * a[k] + wb * b[k];
  return out;
}

}  // namespace detail

inline std::string synth_class_name(std::size_t i) { return "class" + std::to_string(i); }

inline std::string synth_group_name(std::size_t i, bool spurious) {
  return synth_class_name(i) + (spurious ? ":spurious" : ":no_spurious");
}

inline SynthWorld generate(const SynthConfig& cfg) {
  validate_synth_config(cfg);
  const std::size_t d = cfg.d;
  const std::size_t c = cfg.c;
  const std::size_t m = cfg.m();
  const std::size_t jitter_count = std::min(d - c - 1, m * (c - 1));

  Xoshiro256pp rng(cfg.seed);
  auto basis = detail::orthonormal_basis(c + 1 + jitter_count, d, rng);

  SynthWorld world;
  world.config = cfg;
  world.core.assign(basis.begin(), basis.begin() + static_cast<std::ptrdiff_t>(c));
  world.spur = basis[c];
  world.jitter.assign(basis.begin() + static_cast<std::ptrdiff_t>(c + 1), basis.end());

  auto& manifest = world.bundle.manifest;
  manifest.name = "synth";
  for (std::size_t i = 0; i < c; ++i) manifest.classes.push_back(synth_class_name(i));
  for (std::size_t i = 0; i < c; ++i) {
    manifest.groups.push_back(synth_group_name(i, true));
    manifest.groups.push_back(synth_group_name(i, false));
  }
  for (std::size_t j = 0; j < m; ++j) manifest.templates.emplace_back(kTemplateBank[j]);
  manifest.embed_dim = d;

  auto& texts = world.bundle.texts;
  texts = TextEmbeddingTensor(m, c, d);
  for (std::size_t j = 0; j < m; ++j) {
    const double b = cfg.bias_strengths[j];
    for (std::size_t i = 0; i < c; ++i) {
      const double retention = i == 0 ? 0.0 : cfg.core_retention;
      auto t = detail::mix(1.0 - b * (1.0 - retention), world.core[i], b, world.spur);
      detail::scale_to_unit(t);
      if (i > 0) {
        const auto& e = world.jitter[(j * (c - 1) + (i - 1)) % jitter_count];
        for (std::size_t k = 0; k < d; ++k) t[k] += cfg.jitter * e[k];
      }
      auto slot = texts.at(j, i);
      for (std::size_t k = 0; k < d; ++k) slot[k] = static_cast<float>(t[k]);
    }
  }

  const std::size_t n = 2 * c * cfg.n_per_group;
  auto& images = world.bundle.images;
  images = EmbeddingMatrix(n, d);
  auto& labels = world.bundle.labels;
  labels.class_index.reserve(n);
  labels.group_index.reserve(n);
  std::size_t row = 0;
  for (std::size_t i = 0; i < c; ++i) {
    for (int spurious = 1; spurious >= 0; --spurious) {
      const double a = spurious ? cfg.spurious_image_weight : 0.0;
      auto base = detail::mix(1.0 - a, world.core[i], a, world.spur);
      detail::scale_to_unit(base);
      for (std::size_t s = 0; s < cfg.n_per_group; ++s, ++row) {
        auto slot = images.row(row);
        for (std::size_t k = 0; k < d; ++k) {
          slot[k] = static_cast<float>(base[k] + cfg.noise_sigma * rng.normal());
        }
        labels.class_index.push_back(static_cast<int>(i));
        labels.group_index.push_back(static_cast<int>(2 * i + (spurious ? 0 : 1)));
      }
    }
  }
  return world;
}

struct TheoremReport {
  int biased_template = 0;
  int clean_template = 0;
  std::size_t samples = 0;        // spurious-present samples of the second class
  double biased_fraction = 0.0;   // of those, predicted as the first class
  double clean_fraction = 0.0;
  double biased_margin = 0.0;     // mean of sim(first) - sim(second)
  double clean_margin = 0.0;
  double biased_mean_sep = 0.0;   // over all spurious-present samples
  double clean_mean_sep = 0.0;
  bool bias_regime = false;       // bias strength and image weight both >= 0.9
  std::string note;
};

// Checks the biased-prediction outcome on the spurious-present samples of
// class 1 under `biased_template` against the least biased template.
inline TheoremReport verify_theorem(const SynthWorld& world, int biased_template) {
  const auto& cfg = world.config;
  if (biased_template < 0 || static_cast<std::size_t>(biased_template) >= cfg.m()) {
    fail(ErrorCode::kIndexOutOfRange,
         "verify_theorem: template " + std::to_string(biased_template) + " outside [0, " +
             std::to_string(cfg.m()) + ")");
  }
  if (cfg.noise_sigma != 0.0) {
    fail(ErrorCode::kPreconditionViolation, "verify_theorem: world must be noiseless");
  }
  if (cfg.spurious_image_weight <= 0.0) {
    fail(ErrorCode::kPreconditionViolation,
         "verify_theorem: world has no spurious component in images");
  }

  TheoremReport report;
  report.biased_template = biased_template;
  report.clean_template = static_cast<int>(
      std::min_element(cfg.bias_strengths.begin(), cfg.bias_strengths.end()) -
      cfg.bias_strengths.begin());
  report.bias_regime = cfg.bias_strengths[static_cast<std::size_t>(biased_template)] >= 0.9 &&
                       cfg.spurious_image_weight >= 0.9;

  const auto sim = compute_similarity_tensor(world.bundle.images, world.bundle.texts, 1);
  const auto sep = separation_scores(sim, 1);
  const auto& labels = world.bundle.labels;
  const auto bt = static_cast<std::size_t>(report.biased_template);
  const auto ct = static_cast<std::size_t>(report.clean_template);

  std::size_t biased_hits = 0, clean_hits = 0, present = 0;
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels.group_index[n] % 2 != 0) continue;
    ++present;
    report.biased_mean_sep += sep(n, bt);
    report.clean_mean_sep += sep(n, ct);
    if (labels.class_index[n] != 1) continue;
    ++report.samples;
    const double bm = static_cast<double>(sim(n, bt, 0)) - sim(n, bt, 1);
    const double cm = static_cast<double>(sim(n, ct, 0)) - sim(n, ct, 1);
    report.biased_margin += bm;
    report.clean_margin += cm;
    if (bm > 0.0) ++biased_hits;
    if (cm > 0.0) ++clean_hits;
  }
  if (report.samples > 0) {
    const auto s = static_cast<double>(report.samples);
    report.biased_fraction = static_cast<double>(biased_hits) / s;
    report.clean_fraction = static_cast<double>(clean_hits) / s;
    report.biased_margin /= s;
    report.clean_margin /= s;
  }
  if (present > 0) {
    report.biased_mean_sep /= static_cast<double>(present);
    report.clean_mean_sep /= static_cast<double>(present);
  }
  report.note =
      "class prior treated as uniform; the synthetic world has no prior term";
  return report;
}

inline nlohmann::ordered_json synth_truth_json(const SynthWorld& world) {
  const auto& cfg = world.config;
  nlohmann::ordered_json j;
  j["config"] = {{"d", cfg.d},
                 {"n_per_group", cfg.n_per_group},
                 {"c", cfg.c},
                 {"bias_strengths", cfg.bias_strengths},
                 {"spurious_image_weight", cfg.spurious_image_weight},
                 {"noise_sigma", cfg.noise_sigma},
                 {"seed", cfg.seed},
                 {"core_retention", cfg.core_retention},
                 {"jitter", cfg.jitter}};
  j["rng"] = "splitmix64-seeded xoshiro256++, box-muller normals";
  j["core"] = world.core;
  j["spur"] = world.spur;
  j["jitter_directions"] = world.jitter;
  return j;
}

inline void write_synth_world(const SynthWorld& world, const std::filesystem::path& dir) {
  write_bundle(world.bundle, dir);
  detail::write_text_file(dir / "truth.json", synth_truth_json(world).dump(2) + "\n");
}

}  // namespace sage

#endif  // SAGE_SYNTH_HPP_
