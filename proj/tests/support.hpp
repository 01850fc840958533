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

// Shared fixtures: random instances and scratch directories.

#ifndef SAGE_TESTS_SUPPORT_HPP_
#define SAGE_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sage/bundle.hpp"
#include "sage/tensor.hpp"

namespace support {

// Entries are drawn from a small integer grid in half of the instances so
// that exact ties in similarities and separations actually occur.
struct Instance {
  sage::EmbeddingMatrix images;
  sage::TextEmbeddingTensor texts;
};

inline float draw_entry(std::mt19937_64& rng, bool grid) {
  if (grid) return float(std::uniform_int_distribution<int>(-2, 2)(rng));
  return std::uniform_real_distribution<float>(-1.0f, 1.0f)(rng);
}

inline void fill_nonzero(std::span<float> row, std::mt19937_64& rng, bool grid) {
  bool nonzero = false;
  for (float& x : row) {
    x = draw_entry(rng, grid);
    nonzero = nonzero || x != 0.0f;
  }
  if (!nonzero) row[0] = 1.0f;
}

inline Instance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                std::size_t c, std::size_t d) {
  const bool grid = std::bernoulli_distribution(0.5)(rng);
  Instance inst{sage::EmbeddingMatrix(n, d), sage::TextEmbeddingTensor(m, c, d)};
  for (std::size_t r = 0; r < n; ++r) fill_nonzero(inst.images.row(r), rng, grid);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < c; ++i) fill_nonzero(inst.texts.at(j, i), rng, grid);
  return inst;
}

inline std::size_t draw_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline sage::Bundle random_bundle(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                  std::size_t c, std::size_t d, std::size_t groups) {
  sage::Bundle b;
  auto inst = random_instance(rng, n, m, c, d);
  b.images = std::move(inst.images);
  b.texts = std::move(inst.texts);
  b.manifest.name = "random";
  for (std::size_t i = 0; i < c; ++i) b.manifest.classes.push_back("c" + std::to_string(i));
  for (std::size_t g = 0; g < groups; ++g) b.manifest.groups.push_back("g" + std::to_string(g));
  for (std::size_t j = 0; j < m; ++j) {
    b.manifest.templates.push_back("template " + std::to_string(j) + " of a [CLASS].");
  }
  b.manifest.embed_dim = d;
  for (std::size_t r = 0; r < n; ++r) {
    b.labels.class_index.push_back(int(draw_size(rng, 0, c - 1)));
    b.labels.group_index.push_back(int(draw_size(rng, 0, groups - 1)));
  }
  return b;
}

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sage_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  return sage::detail::read_text_file(p);
}

}  // namespace support

#endif  // SAGE_TESTS_SUPPORT_HPP_
