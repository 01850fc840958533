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

// Group-robustness metrics and template statistics.
//
// AVG is correct / N over all samples. WGA is the minimum accuracy over the
// groups that contain at least one sample; empty groups are skipped and
// listed in the report. HM = 2 * AVG * WGA / (AVG + WGA), defined as 0 when
// both are 0. Everything is computed in double; rounding to one decimal in
// percent happens only in format_percent.

#ifndef SAGE_METRICS_HPP_
#define SAGE_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sage/bundle.hpp"
#include "sage/error.hpp"
#include "sage/parallel.hpp"
#include "sage/selector.hpp"
#include "sage/tensor.hpp"

namespace sage {

inline double harmonic_mean(double avg, double wga) {
  const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(avg) || !in_unit(wga)) {
    fail(ErrorCode::kDomainError, "harmonic_mean: arguments must lie in [0, 1], got (" +
                                      std::to_string(avg) + ", " + std::to_string(wga) + ")");
  }
  if (avg + wga == 0.0) return 0.0;
  return 2.0 * avg * wga / (avg + wga);
}

// Half-up rounding to one decimal of the percentage. The small bias absorbs
// binary representation error, e.g. 0.6135 * 1000 = 613.4999...
inline double round_percent(double fraction) {
  return std::floor(fraction * 1000.0 + 0.5 + 1e-9) / 10.0;
}

inline std::string format_percent(double fraction) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.1f", round_percent(fraction));
  return buffer;
}

struct GroupStat {
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;  // meaningless when count == 0

  bool empty() const { return count == 0; }
  bool operator==(const GroupStat&) const = default;
};

struct EvalReport {
  Variant variant;
  std::size_t samples = 0;
  std::size_t correct = 0;
  double avg = 0.0;
  double wga = 0.0;
  double hm = 0.0;
  std::vector<GroupStat> groups;
  std::vector<int> empty_groups;
  int runs = 1;  // > 1 for aggregated random-baseline reports

  bool operator==(const EvalReport&) const = default;
};

inline EvalReport evaluate(const PredictionSet& preds, const LabelTable& labels,
                           std::size_t group_count) {
  if (preds.images != labels.size() || preds.predicted.size() != labels.size()) {
    fail(ErrorCode::kShapeMismatch, "evaluate: " + std::to_string(preds.images) +
                                        " predictions vs " + std::to_string(labels.size()) +
                                        " labels");
  }
  if (labels.size() == 0) fail(ErrorCode::kAllGroupsEmpty, "evaluate: no samples");

  EvalReport report;
  report.variant = preds.variant;
  report.samples = labels.size();
  report.groups.assign(group_count, GroupStat{});
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const int g = labels.group_index[n];
    if (g < 0 || static_cast<std::size_t>(g) >= group_count) {
      fail(ErrorCode::kShapeMismatch, "evaluate: group index " + std::to_string(g) +
                                          " outside [0, " + std::to_string(group_count) + ")");
    }
    const bool hit = preds.predicted[n] == labels.class_index[n];
    auto& stat = report.groups[static_cast<std::size_t>(g)];
    ++stat.count;
    if (hit) {
      ++stat.correct;
      ++report.correct;
    }
  }
  report.avg = static_cast<double>(report.correct) / static_cast<double>(report.samples);

  bool any = false;
  for (std::size_t g = 0; g < group_count; ++g) {
    auto& stat = report.groups[g];
    if (stat.empty()) {
      report.empty_groups.push_back(static_cast<int>(g));
      continue;
    }
    stat.accuracy = static_cast<double>(stat.correct) / static_cast<double>(stat.count);
    report.wga = any ? std::min(report.wga, stat.accuracy) : stat.accuracy;
    any = true;
  }
  report.hm = harmonic_mean(report.avg, report.wga);
  return report;
}

inline EvalReport evaluate(const PredictionSet& preds, const LabelTable& labels,
                           const DatasetManifest& manifest) {
  if (preds.classes != manifest.classes.size()) {
    fail(ErrorCode::kShapeMismatch, "evaluate: predictions over " +
                                        std::to_string(preds.classes) + " classes, manifest has " +
                                        std::to_string(manifest.classes.size()));
  }
  return evaluate(preds, labels, manifest.groups.size());
}

// Mean over runs of AVG, WGA and each group accuracy; HM is taken of the
// averaged AVG and WGA so the triple stays internally consistent.
inline EvalReport aggregate_runs(std::span<const EvalReport> runs) {
  if (runs.empty()) fail(ErrorCode::kPreconditionViolation, "aggregate_runs: no runs");
  EvalReport out = runs.front();
  out.runs = static_cast<int>(runs.size());
  const auto count = static_cast<double>(runs.size());
  double avg = 0.0, wga = 0.0;
  std::vector<double> group_acc(out.groups.size(), 0.0);
  for (const auto& r : runs) {
    avg += r.avg;
    wga += r.wga;
    for (std::size_t g = 0; g < group_acc.size(); ++g) group_acc[g] += r.groups[g].accuracy;
  }
  out.avg = avg / count;
  out.wga = wga / count;
  out.hm = harmonic_mean(out.avg, out.wga);
  out.correct = 0;
  for (std::size_t g = 0; g < group_acc.size(); ++g) {
    out.groups[g].correct = 0;
    out.groups[g].accuracy = group_acc[g] / count;
  }
  return out;
}

// Sample Pearson coefficient, two-pass for stability.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    fail(ErrorCode::kLengthMismatch, "pearson: lengths " + std::to_string(xs.size()) + " and " +
                                         std::to_string(ys.size()));
  }
  if (xs.size() < 2) {
    fail(ErrorCode::kLengthMismatch, "pearson: need at least 2 points, got " +
                                         std::to_string(xs.size()));
  }
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx;
    const double dy = ys[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0) fail(ErrorCode::kConstantInput, "pearson: first argument is constant");
  if (syy == 0.0) fail(ErrorCode::kConstantInput, "pearson: second argument is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Per-template statistics. Fields not produced by a given call stay empty.
struct TemplateStats {
  std::size_t templates = 0;
  std::size_t classes = 0;
  std::vector<std::size_t> frequency;           // M
  std::vector<std::size_t> frequency_by_class;  // C x M
  std::vector<double> mean_sep;                 // M
  std::vector<double> wga;                      // M

  std::span<const std::size_t> class_frequency(std::size_t i) const {
    return {frequency_by_class.data() + i * templates, templates};
  }

  bool operator==(const TemplateStats&) const = default;
};

struct CorrelationResult {
  TemplateStats stats;
  double pcc = 0.0;
};

namespace detail {

inline std::string index_list(std::size_t count) {
  std::string out;
  for (std::size_t j = 0; j < count; ++j) {
    if (j) out += ",";
    out += std::to_string(j);
  }
  return out;
}

}  // namespace detail

// Mean separation and single-template WGA for every template, then their
// correlation across templates.
inline CorrelationResult template_correlation(const SimilarityTensor& sim,
                                              const LabelTable& labels, std::size_t group_count,
                                              std::size_t workers) {
  if (sim.templates < 2) {
    fail(ErrorCode::kLengthMismatch, "template_correlation: need at least 2 templates, got " +
                                         std::to_string(sim.templates));
  }
  const SeparationScores sep = separation_scores(sim, workers);
  CorrelationResult result;
  auto& stats = result.stats;
  stats.templates = sim.templates;
  stats.classes = sim.classes;
  stats.mean_sep.assign(sim.templates, 0.0);
  stats.wga.assign(sim.templates, 0.0);
  parallel_for(sim.templates, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      double sum = 0.0;
      for (std::size_t n = 0; n < sim.images; ++n) sum += static_cast<double>(sep(n, j));
      stats.mean_sep[j] = sim.images ? sum / static_cast<double>(sim.images) : 0.0;
      const auto preds = predict_vanilla(sim, static_cast<int>(j));
      stats.wga[j] = evaluate(preds, labels, group_count).wga;
    }
  });
  try {
    result.pcc = pearson(stats.mean_sep, stats.wga);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConstantInput) throw;
    fail(ErrorCode::kConstantInput, std::string(e.what()) + " across templates " +
                                        detail::index_list(sim.templates));
  }
  return result;
}

inline CorrelationResult template_correlation(const SimilarityTensor& sim,
                                              const LabelTable& labels,
                                              std::size_t group_count) {
  return template_correlation(sim, labels, group_count, worker_count());
}

// Counts every selected slot, overall and per true class.
inline TemplateStats selection_frequency(const Selection& selection, const LabelTable& labels,
                                         std::size_t templates, std::size_t classes) {
  if (selection.images != labels.size()) {
    fail(ErrorCode::kShapeMismatch, "selection_frequency: " + std::to_string(selection.images) +
                                        " selections vs " + std::to_string(labels.size()) +
                                        " labels");
  }
  TemplateStats stats;
  stats.templates = templates;
  stats.classes = classes;
  stats.frequency.assign(templates, 0);
  stats.frequency_by_class.assign(classes * templates, 0);
  for (std::size_t n = 0; n < selection.images; ++n) {
    const auto y = static_cast<std::size_t>(labels.class_index[n]);
    for (int j : selection.row(n)) {
      ++stats.frequency[static_cast<std::size_t>(j)];
      ++stats.frequency_by_class[y * templates + static_cast<std::size_t>(j)];
    }
  }
  return stats;
}

// Template indices by descending count, ties to the lower index.
inline std::vector<int> rank_by_count(std::span<const std::size_t> counts) {
  std::vector<int> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return counts[a] > counts[b]; });
  return order;
}

}  // namespace sage

#endif  // SAGE_METRICS_HPP_
