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

// Serializers for the files the CLI writes. JSON keeps full precision; the
// CSV summaries show percentages rounded half-up to one decimal.

#ifndef SAGE_REPORT_HPP_
#define SAGE_REPORT_HPP_

#include <charconv>
#include <string>
#include <vector>

#include "json.hpp"
#include "sage/bundle.hpp"
#include "sage/csv.hpp"
#include "sage/metrics.hpp"
#include "sage/selector.hpp"

namespace sage {

// Shortest decimal string that round-trips.
inline std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return {buffer, result.ptr};
}

inline std::string predictions_csv(const PredictionSet& preds, const LabelTable& labels,
                                   const DatasetManifest& manifest) {
  std::string out = "index,variant,y_true,y_pred,top_templates\n";
  const std::string tag = preds.variant.tag();
  for (std::size_t n = 0; n < preds.images; ++n) {
    std::string templates;
    for (int j : preds.templates_of(n)) {
      if (!templates.empty()) templates += ';';
      templates += std::to_string(j);
    }
    const std::vector<std::string> fields = {
        std::to_string(n), tag,
        manifest.classes[static_cast<std::size_t>(labels.class_index[n])],
        manifest.classes[static_cast<std::size_t>(preds.predicted[n])], templates};
    out += csv::join(fields);
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json variant_json(const Variant& v) {
  nlohmann::ordered_json j;
  j["tag"] = v.tag();
  switch (v.kind) {
    case VariantKind::kSage:
      j["kind"] = "sage";
      j["k"] = v.k;
      break;
    case VariantKind::kVanilla:
      j["kind"] = "vanilla";
      j["template"] = v.template_index;
      break;
    case VariantKind::kEnsemble:
      j["kind"] = "ensemble";
      j["k"] = v.k;
      break;
    case VariantKind::kRandom:
      j["kind"] = "random";
      j["k"] = v.k;
      j["seed"] = v.seed;
      j["scope"] = v.scope == RandomScope::kDataset ? "dataset" : "image";
      break;
  }
  return j;
}

inline nlohmann::ordered_json eval_report_json(const EvalReport& r,
                                               const DatasetManifest& manifest) {
  nlohmann::ordered_json j;
  j["variant"] = variant_json(r.variant);
  if (r.runs > 1) {
    j["runs"] = r.runs;
    j["aggregate"] = "mean of per-run avg and wga; hm of the means";
  }
  j["samples"] = r.samples;
  if (r.runs == 1) j["correct"] = r.correct;
  j["avg"] = r.avg;
  j["wga"] = r.wga;
  j["hm"] = r.hm;
  auto groups = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < r.groups.size(); ++g) {
    nlohmann::ordered_json entry;
    entry["name"] = manifest.groups[g];
    entry["count"] = r.groups[g].count;
    if (r.groups[g].empty()) {
      entry["accuracy"] = nullptr;
    } else {
      entry["accuracy"] = r.groups[g].accuracy;
    }
    groups.push_back(entry);
  }
  j["groups"] = groups;
  auto empty = nlohmann::ordered_json::array();
  for (int g : r.empty_groups) empty.push_back(manifest.groups[static_cast<std::size_t>(g)]);
  j["empty_groups"] = empty;
  return j;
}

// report.csv: one row per evaluated variant.
inline std::string summary_csv(const std::vector<EvalReport>& reports) {
  std::string out = "variant,runs,avg,wga,hm\n";
  for (const auto& r : reports) {
    const std::vector<std::string> fields = {r.variant.tag(), std::to_string(r.runs),
                                             format_percent(r.avg), format_percent(r.wga),
                                             format_percent(r.hm)};
    out += csv::join(fields);
    out += '\n';
  }
  return out;
}

struct AblationRow {
  std::string variant;
  std::size_t k = 0;
  EvalReport report;
};

inline std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "variant,k,avg,wga,hm\n";
  for (const auto& row : rows) {
    const std::vector<std::string> fields = {
        row.variant, std::to_string(row.k), format_percent(row.report.avg),
        format_percent(row.report.wga), format_percent(row.report.hm)};
    out += csv::join(fields);
    out += '\n';
  }
  return out;
}

inline std::string correlation_csv(const TemplateStats& stats, const DatasetManifest& manifest) {
  std::string out = "template_index,template_text,mean_sep,wga\n";
  for (std::size_t j = 0; j < stats.templates; ++j) {
    const std::vector<std::string> fields = {std::to_string(j), manifest.templates[j],
                                             format_double(stats.mean_sep[j]),
                                             format_double(stats.wga[j])};
    out += csv::join(fields);
    out += '\n';
  }
  return out;
}

// freq.csv: for the overall histogram ("all") and then each class, every
// template ranked by descending count.
inline std::string frequency_csv(const TemplateStats& stats, const DatasetManifest& manifest) {
  std::string out = "scope,rank,template_index,template_text,count\n";
  const auto emit = [&](const std::string& scope, std::span<const std::size_t> counts) {
    const auto order = rank_by_count(counts);
    for (std::size_t r = 0; r < order.size(); ++r) {
      const auto j = static_cast<std::size_t>(order[r]);
      const std::vector<std::string> fields = {scope, std::to_string(r + 1), std::to_string(j),
                                               manifest.templates[j],
                                               std::to_string(counts[j])};
      out += csv::join(fields);
      out += '\n';
    }
  };
  emit("all", stats.frequency);
  for (std::size_t i = 0; i < stats.classes; ++i) {
    emit(manifest.classes[i], stats.class_frequency(i));
  }
  return out;
}

}  // namespace sage

#endif  // SAGE_REPORT_HPP_
