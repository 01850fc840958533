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

// On-disk embedding bundle:
//
//   manifest.json  name, classes, groups, templates, embed_dim, files{...}
//   images.npy     (N, D) <f4, un-normalized image embeddings
//   texts.npy      (M, C, D) <f4, template-major text embeddings
//   labels.csv     "index,class,group" with class/group given by name
//
// load_bundle validates every cross-file invariant and maps each defect to a
// single ErrorCode. write_bundle validates first and only then touches disk.

#ifndef SAGE_BUNDLE_HPP_
#define SAGE_BUNDLE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "sage/csv.hpp"
#include "sage/error.hpp"
#include "sage/npy.hpp"
#include "sage/tensor.hpp"

namespace sage {

inline constexpr std::string_view kClassPlaceholder = "[CLASS]";
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kLabelsHeader = "index,class,group";

struct BundleFiles {
  std::string images = "images.npy";
  std::string texts = "texts.npy";
  std::string labels = "labels.csv";

  bool operator==(const BundleFiles&) const = default;
};

struct DatasetManifest {
  std::string name;
  std::vector<std::string> classes;
  std::vector<std::string> groups;
  std::vector<std::string> templates;
  std::size_t embed_dim = 0;
  BundleFiles files;

  bool operator==(const DatasetManifest&) const = default;
};

struct LabelTable {
  std::vector<int> class_index;  // y_n, one per image row
  std::vector<int> group_index;  // g_n, one per image row

  std::size_t size() const { return class_index.size(); }
  bool operator==(const LabelTable&) const = default;
};

struct Bundle {
  DatasetManifest manifest;
  EmbeddingMatrix images;
  TextEmbeddingTensor texts;
  LabelTable labels;

  bool operator==(const Bundle&) const = default;
};

inline std::size_t count_occurrences(std::string_view text,
                                     std::string_view needle) {
  std::size_t count = 0;
  for (auto at = text.find(needle); at != std::string_view::npos;
       at = text.find(needle, at + needle.size())) {
    ++count;
  }
  return count;
}

// Fills the class placeholder of a prompt template.
inline std::string instantiate_template(std::string_view prompt,
                                        std::string_view class_name) {
  std::string out(prompt);
  const auto at = out.find(kClassPlaceholder);
  if (at != std::string::npos) {
    out.replace(at, kClassPlaceholder.size(), class_name);
  }
  return out;
}

namespace detail {

inline void require_unique(const std::vector<std::string>& names,
                           std::string_view what) {
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) {
      fail(ErrorCode::kInvariantViolation,
           "manifest: duplicate " + std::string(what) + " name '" + name + "'");
    }
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kMissingFile, "missing file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::kIoError, "short write to " + path.string());
}

inline double squared_norm(std::span<const float> v) {
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * static_cast<double>(x);
  return sum;
}

template <typename Code>
void check_values(std::span<const float> values, std::size_t row_width,
                  std::string_view tensor, Code&& describe_row) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      fail(ErrorCode::kNonFiniteValue,
           std::string(tensor) + ": non-finite value at flat index " +
               std::to_string(k) + " (" + describe_row(k / row_width) +
               ", column " + std::to_string(k % row_width) + ")");
    }
  }
  if (row_width == 0) return;
  for (std::size_t r = 0; r * row_width < values.size(); ++r) {
    if (squared_norm(values.subspan(r * row_width, row_width)) == 0.0) {
      fail(ErrorCode::kZeroNormRow,
           std::string(tensor) + ": zero-norm " + describe_row(r));
    }
  }
}

}  // namespace detail

// Throws InvariantViolation.
inline void validate_manifest(const DatasetManifest& m) {
  if (m.classes.size() < 2) {
    fail(ErrorCode::kInvariantViolation, "manifest: need at least 2 classes");
  }
  if (m.groups.empty()) {
    fail(ErrorCode::kInvariantViolation, "manifest: need at least 1 group");
  }
  if (m.templates.empty()) {
    fail(ErrorCode::kInvariantViolation, "manifest: need at least 1 template");
  }
  if (m.embed_dim == 0) {
    fail(ErrorCode::kInvariantViolation, "manifest: embed_dim must be positive");
  }
  for (std::size_t j = 0; j < m.templates.size(); ++j) {
    if (count_occurrences(m.templates[j], kClassPlaceholder) != 1) {
      fail(ErrorCode::kInvariantViolation,
           "manifest: template " + std::to_string(j) + " ('" + m.templates[j] +
               "') must contain [CLASS] exactly once");
    }
  }
  detail::require_unique(m.classes, "class");
  detail::require_unique(m.groups, "group");
}

// Shape, finiteness, non-zero rows and label ranges. Throws the matching
// data-error code.
inline void validate_bundle(const Bundle& b) {
  validate_manifest(b.manifest);
  const auto& m = b.manifest;
  const std::size_t dim = m.embed_dim;

  if (b.images.dim != dim || b.images.data.size() != b.images.rows * b.images.dim) {
    fail(ErrorCode::kShapeMismatch,
         "images: expected (N, " + std::to_string(dim) + "), found (" +
             std::to_string(b.images.rows) + ", " + std::to_string(b.images.dim) + ")");
  }
  if (b.texts.templates != m.templates.size() || b.texts.classes != m.classes.size() ||
      b.texts.dim != dim ||
      b.texts.data.size() != b.texts.templates * b.texts.classes * b.texts.dim) {
    fail(ErrorCode::kShapeMismatch,
         "texts: expected (" + std::to_string(m.templates.size()) + ", " +
             std::to_string(m.classes.size()) + ", " + std::to_string(dim) +
             "), found (" + std::to_string(b.texts.templates) + ", " +
             std::to_string(b.texts.classes) + ", " + std::to_string(b.texts.dim) + ")");
  }
  detail::check_values(b.images.data, dim, "images",
                       [](std::size_t r) { return "row " + std::to_string(r); });
  const std::size_t classes = b.texts.classes;
  detail::check_values(b.texts.data, dim, "texts", [classes](std::size_t r) {
    return "slice (template " + std::to_string(r / classes) + ", class " +
           std::to_string(r % classes) + ")";
  });

  const auto& labels = b.labels;
  if (labels.class_index.size() != b.images.rows ||
      labels.group_index.size() != b.images.rows) {
    fail(ErrorCode::kShapeMismatch,
         "labels: expected " + std::to_string(b.images.rows) + " records, found " +
             std::to_string(labels.class_index.size()));
  }
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const int y = labels.class_index[n];
    const int g = labels.group_index[n];
    if (y < 0 || static_cast<std::size_t>(y) >= m.classes.size() || g < 0 ||
        static_cast<std::size_t>(g) >= m.groups.size()) {
      fail(ErrorCode::kInvariantViolation,
           "labels: record " + std::to_string(n) + " has out-of-range class/group");
    }
  }
}

inline nlohmann::ordered_json manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["name"] = m.name;
  j["classes"] = m.classes;
  j["groups"] = m.groups;
  j["templates"] = m.templates;
  j["embed_dim"] = m.embed_dim;
  j["files"] = {{"images", m.files.images},
                {"texts", m.files.texts},
                {"labels", m.files.labels}};
  return j;
}

inline DatasetManifest manifest_from_json(std::string_view text,
                                          const std::string& label) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kMalformedHeader, label + ": " + e.what());
  }
  DatasetManifest m;
  try {
    if (!j.is_object()) fail(ErrorCode::kMalformedHeader, label + ": not a JSON object");
    m.name = j.at("name").get<std::string>();
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.groups = j.at("groups").get<std::vector<std::string>>();
    m.templates = j.at("templates").get<std::vector<std::string>>();
    const auto& dim = j.at("embed_dim");
    if (!dim.is_number_integer() || dim.get<long long>() < 0) {
      fail(ErrorCode::kMalformedHeader, label + ": embed_dim must be a non-negative integer");
    }
    m.embed_dim = dim.get<std::size_t>();
    const auto& files = j.at("files");
    m.files.images = files.at("images").get<std::string>();
    m.files.texts = files.at("texts").get<std::string>();
    m.files.labels = files.at("labels").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedHeader, label + ": " + e.what());
  }
  return m;
}

inline std::string labels_to_csv(const LabelTable& labels,
                                 const DatasetManifest& m) {
  std::string out(kLabelsHeader);
  out.push_back('\n');
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const std::array<std::string, 3> fields = {
        std::to_string(n), m.classes[static_cast<std::size_t>(labels.class_index[n])],
        m.groups[static_cast<std::size_t>(labels.group_index[n])]};
    out += csv::join(fields);
    out.push_back('\n');
  }
  return out;
}

// Records may appear in any order; each index in [0, rows) exactly once.
inline LabelTable labels_from_csv(std::string_view text, const DatasetManifest& m,
                                  std::size_t rows, const std::string& label) {
  std::unordered_map<std::string, int> class_ids;
  std::unordered_map<std::string, int> group_ids;
  for (std::size_t i = 0; i < m.classes.size(); ++i) class_ids[m.classes[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < m.groups.size(); ++i) group_ids[m.groups[i]] = static_cast<int>(i);

  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < text.size();) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kLabelsHeader) {
    fail(ErrorCode::kMalformedHeader,
         label + ": header must be '" + std::string(kLabelsHeader) + "'");
  }
  const std::size_t records = lines.size() - 1;
  if (records != rows) {
    fail(ErrorCode::kShapeMismatch,
         label + ": expected " + std::to_string(rows) + " records, found " +
             std::to_string(records));
  }

  LabelTable table;
  table.class_index.assign(rows, -1);
  table.group_index.assign(rows, -1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = csv::split(lines[r]);
    if (!fields || fields->size() != 3) {
      fail(ErrorCode::kMalformedHeader,
           label + ": line " + std::to_string(r + 1) + " is not 'index,class,group'");
    }
    const std::string& index_text = (*fields)[0];
    std::size_t index = 0;
    if (index_text.empty() ||
        !std::all_of(index_text.begin(), index_text.end(),
                     [](char c) { return c >= '0' && c <= '9'; }) ||
        index_text.size() > 18) {
      fail(ErrorCode::kMalformedHeader,
           label + ": line " + std::to_string(r + 1) + " has a non-integer index");
    }
    index = std::stoull(index_text);
    if (index >= rows || table.class_index[index] != -1) {
      fail(ErrorCode::kInvariantViolation,
           label + ": index " + index_text + " out of range or repeated");
    }
    const auto cls = class_ids.find((*fields)[1]);
    const auto grp = group_ids.find((*fields)[2]);
    if (cls == class_ids.end() || grp == group_ids.end()) {
      fail(ErrorCode::kInvariantViolation,
           label + ": line " + std::to_string(r + 1) + " names an unknown class or group");
    }
    table.class_index[index] = cls->second;
    table.group_index[index] = grp->second;
  }
  return table;
}

inline Bundle load_bundle(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestFile;
  if (!std::filesystem::exists(manifest_path)) {
    fail(ErrorCode::kMissingFile, "missing file " + manifest_path.string());
  }
  Bundle b;
  b.manifest = manifest_from_json(detail::read_text_file(manifest_path),
                                  manifest_path.string());
  validate_manifest(b.manifest);
  const auto& m = b.manifest;

  for (const auto* name : {&m.files.images, &m.files.texts, &m.files.labels}) {
    if (!std::filesystem::exists(dir / *name)) {
      fail(ErrorCode::kMissingFile, "missing file " + (dir / *name).string());
    }
  }

  npy::Array images = npy::read(dir / m.files.images);
  if (images.shape.size() != 2 || images.shape[1] != m.embed_dim) {
    fail(ErrorCode::kShapeMismatch,
         m.files.images + ": expected shape (N, " + std::to_string(m.embed_dim) +
             "), found " + npy::shape_string(images.shape));
  }
  b.images.rows = images.shape[0];
  b.images.dim = images.shape[1];
  b.images.data = std::move(images.data);

  npy::Array texts = npy::read(dir / m.files.texts);
  const std::vector<std::size_t> want = {m.templates.size(), m.classes.size(), m.embed_dim};
  if (texts.shape != want) {
    fail(ErrorCode::kShapeMismatch,
         m.files.texts + ": expected shape " + npy::shape_string(want) + ", found " +
             npy::shape_string(texts.shape));
  }
  b.texts.templates = want[0];
  b.texts.classes = want[1];
  b.texts.dim = want[2];
  b.texts.data = std::move(texts.data);

  b.labels = labels_from_csv(detail::read_text_file(dir / m.files.labels), m,
                             b.images.rows, (dir / m.files.labels).string());
  validate_bundle(b);
  return b;
}

inline void write_bundle(const Bundle& b, const std::filesystem::path& dir) {
  try {
    validate_bundle(b);
  } catch (const Error& e) {
    fail(ErrorCode::kInvariantViolation,
         std::string(error_code_name(e.code())) + ": " + e.what());
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  const auto& m = b.manifest;
  detail::write_text_file(dir / kManifestFile, manifest_to_json(m).dump(2) + "\n");
  const std::array<std::size_t, 2> image_shape = {b.images.rows, b.images.dim};
  npy::write(dir / m.files.images, image_shape, b.images.data);
  const std::array<std::size_t, 3> text_shape = {b.texts.templates, b.texts.classes,
                                                 b.texts.dim};
  npy::write(dir / m.files.texts, text_shape, b.texts.data);
  detail::write_text_file(dir / m.files.labels, labels_to_csv(b.labels, m));
}

}  // namespace sage

#endif  // SAGE_BUNDLE_HPP_
