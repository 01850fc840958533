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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "sage/metrics.hpp"
#include "sage/similarity.hpp"
#include "support.hpp"

namespace {

using sage::ErrorCode;

ErrorCode error_of(auto&& f) {
  try {
    f();
  } catch (const sage::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kIoError;
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const sage::Error& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected an error";
  return {};
}

sage::PredictionSet preds_of(std::vector<int> predicted, std::size_t classes) {
  sage::PredictionSet p;
  p.images = predicted.size();
  p.classes = classes;
  p.predicted = std::move(predicted);
  return p;
}

sage::LabelTable labels_of(std::vector<int> y, std::vector<int> g) {
  return {std::move(y), std::move(g)};
}

TEST(HarmonicMean, EqualArgumentsAreFixed) {
  for (int k = 0; k <= 100; ++k) {
    const double x = k / 100.0;
    EXPECT_NEAR(sage::harmonic_mean(x, x), x, 1e-15);
  }
}

TEST(HarmonicMean, ReportedTableValues) {
  EXPECT_NEAR(sage::harmonic_mean(0.923, 0.460), 0.6140, 5e-4);
  EXPECT_EQ(sage::format_percent(sage::harmonic_mean(0.923, 0.460)), "61.4");
  EXPECT_NEAR(sage::harmonic_mean(0.887, 0.410), 0.5608, 5e-5);
  EXPECT_EQ(sage::format_percent(sage::harmonic_mean(0.887, 0.410)), "56.1");
  EXPECT_NEAR(sage::harmonic_mean(0.811, 0.753), 0.7809, 5e-5);
  EXPECT_EQ(sage::format_percent(sage::harmonic_mean(0.811, 0.753)), "78.1");
}

TEST(HarmonicMean, Degenerate) {
  EXPECT_EQ(sage::harmonic_mean(1.0, 0.0), 0.0);
  EXPECT_EQ(sage::harmonic_mean(0.0, 0.0), 0.0);
  EXPECT_EQ(sage::harmonic_mean(1.0, 1.0), 1.0);
}

TEST(HarmonicMean, DomainErrors) {
  EXPECT_EQ(error_of([] { sage::harmonic_mean(-0.01, 0.5); }), ErrorCode::kDomainError);
  EXPECT_EQ(error_of([] { sage::harmonic_mean(0.5, 1.01); }), ErrorCode::kDomainError);
  EXPECT_EQ(error_of([] { sage::harmonic_mean(std::nan(""), 0.5); }), ErrorCode::kDomainError);
}

TEST(HarmonicMean, MeanChain) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(1e-9, 1.0);
  for (int t = 0; t < 10000; ++t) {
    const double a = unit(rng), w = unit(rng);
    const double hm = sage::harmonic_mean(a, w);
    const double lo = std::min(a, w), hi = std::max(a, w);
    EXPECT_LE(hm, lo * 2.0 / (1.0 + lo / hi) * (1 + 1e-15));
    EXPECT_LE(hm, std::sqrt(a * w) * (1 + 1e-15));
    EXPECT_LE(std::sqrt(a * w), (a + w) / 2.0 * (1 + 1e-15));
    EXPECT_GE(hm, lo);
  }
}

TEST(FormatPercent, HalfUpToOneDecimal) {
  EXPECT_EQ(sage::format_percent(0.6135), "61.4");
  EXPECT_EQ(sage::format_percent(0.61349), "61.3");
  EXPECT_EQ(sage::format_percent(0.0005), "0.1");
  EXPECT_EQ(sage::format_percent(0.00049), "0.0");
  EXPECT_EQ(sage::format_percent(1.0), "100.0");
  EXPECT_EQ(sage::format_percent(0.0), "0.0");
  EXPECT_EQ(sage::format_percent(0.9995), "100.0");
}

TEST(Evaluate, PerfectClassifier) {
  const auto r = sage::evaluate(preds_of({0, 1, 1, 0}, 2), labels_of({0, 1, 1, 0}, {0, 1, 2, 3}), 4);
  EXPECT_EQ(r.avg, 1.0);
  EXPECT_EQ(r.wga, 1.0);
  EXPECT_EQ(r.hm, 1.0);
}

TEST(Evaluate, AverageIsSampleWeighted) {
  // Group 0: 3/4 correct, group 1: 0/1 correct. Mean of groups would be 0.375.
  const auto r = sage::evaluate(preds_of({0, 0, 0, 1, 1}, 2), labels_of({0, 0, 0, 0, 0}, {0, 0, 0, 0, 1}), 2);
  EXPECT_EQ(r.avg, 0.6);
  EXPECT_EQ(r.wga, 0.0);
  EXPECT_EQ(r.groups[0].accuracy, 0.75);
  EXPECT_EQ(r.groups[0].count, 4u);
  EXPECT_EQ(r.hm, 0.0);
}

TEST(Evaluate, EmptyGroupsAreSkippedAndListed) {
  const auto r = sage::evaluate(preds_of({0, 1, 1}, 2), labels_of({0, 1, 0}, {0, 2, 2}), 4);
  EXPECT_EQ(r.empty_groups, (std::vector<int>{1, 3}));
  EXPECT_EQ(r.wga, 0.5);
  EXPECT_TRUE(r.groups[1].empty());
}

TEST(Evaluate, Errors) {
  EXPECT_EQ(error_of([] { sage::evaluate(preds_of({}, 2), labels_of({}, {}), 2); }),
            ErrorCode::kAllGroupsEmpty);
  EXPECT_EQ(error_of([] { sage::evaluate(preds_of({0}, 2), labels_of({0, 1}, {0, 0}), 2); }),
            ErrorCode::kShapeMismatch);
  sage::DatasetManifest m;
  m.classes = {"a", "b", "c"};
  m.groups = {"g"};
  EXPECT_EQ(error_of([&] { sage::evaluate(preds_of({0}, 2), labels_of({0}, {0}), m); }),
            ErrorCode::kShapeMismatch);
}

TEST(Evaluate, MatchesNaiveCountingAndBounds) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = support::draw_size(rng, 1, 60);
    const int groups = int(support::draw_size(rng, 1, 6));
    std::vector<int> pred, y, g;
    for (std::size_t k = 0; k < n; ++k) {
      pred.push_back(int(support::draw_size(rng, 0, 2)));
      y.push_back(int(support::draw_size(rng, 0, 2)));
      g.push_back(int(support::draw_size(rng, 0, std::size_t(groups - 1))));
    }
    const auto r = sage::evaluate(preds_of(pred, 3), labels_of(y, g), std::size_t(groups));
    const auto e = oracle::evaluate(pred, y, g, groups);
    EXPECT_EQ(r.avg, e.avg);
    EXPECT_EQ(r.wga, e.wga);
    double lo = 2.0, hi = -1.0;
    for (int k = 0; k < groups; ++k) {
      if (e.group_acc[k] < 0) {
        EXPECT_TRUE(r.groups[k].empty());
        continue;
      }
      EXPECT_EQ(r.groups[k].accuracy, e.group_acc[k]);
      lo = std::min(lo, e.group_acc[k]);
      hi = std::max(hi, e.group_acc[k]);
    }
    EXPECT_LE(lo, r.avg + 1e-15);
    EXPECT_LE(r.avg, hi + 1e-15);
  }
}

TEST(Evaluate, AggregateOfRuns) {
  sage::EvalReport a, b;
  a.avg = 0.9;
  a.wga = 0.5;
  a.groups = {{2, 1, 0.5}};
  b.avg = 0.7;
  b.wga = 0.3;
  b.groups = {{2, 0, 0.3}};
  const std::vector<sage::EvalReport> runs = {a, b};
  const auto agg = sage::aggregate_runs(runs);
  EXPECT_DOUBLE_EQ(agg.avg, 0.8);
  EXPECT_DOUBLE_EQ(agg.wga, 0.4);
  EXPECT_DOUBLE_EQ(agg.hm, sage::harmonic_mean(0.8, 0.4));
  EXPECT_DOUBLE_EQ(agg.groups[0].accuracy, 0.4);
  EXPECT_EQ(agg.runs, 2);
}

TEST(Pearson, LinearRelations) {
  const std::vector<double> xs = {0.3, 1.0, 2.5, 7.0, -1.0};
  std::vector<double> up, down;
  for (double x : xs) {
    up.push_back(2 * x + 1);
    down.push_back(-x);
  }
  EXPECT_NEAR(sage::pearson(xs, up), 1.0, 1e-15);
  EXPECT_NEAR(sage::pearson(xs, down), -1.0, 1e-15);
}

TEST(Pearson, HandComputed) {
  // cov = 1.0 per point sum 4, var x = var y = 5 -> 4/5.
  EXPECT_NEAR(sage::pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8,
              1e-15);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> xs(12), ys(12);
    for (auto& x : xs) x = normal(rng);
    for (auto& y : ys) y = normal(rng);
    const double base = sage::pearson(xs, ys);
    std::vector<double> xt, yt;
    for (double x : xs) xt.push_back(3.5 * x - 2.0);
    for (double y : ys) yt.push_back(0.25 * y + 10.0);
    EXPECT_NEAR(sage::pearson(xt, yt), base, 1e-12);
  }
}

TEST(Pearson, Errors) {
  EXPECT_EQ(error_of([] { sage::pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }),
            ErrorCode::kConstantInput);
  EXPECT_EQ(error_of([] { sage::pearson(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4}); }),
            ErrorCode::kConstantInput);
  EXPECT_EQ(error_of([] { sage::pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}); }),
            ErrorCode::kLengthMismatch);
  EXPECT_EQ(error_of([] { sage::pearson(std::vector<double>{1}, std::vector<double>{1}); }),
            ErrorCode::kLengthMismatch);
}

TEST(TemplateCorrelation, MatchesPerTemplateOracle) {
  std::mt19937_64 rng(44);
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    auto b = support::random_bundle(rng, 30, 3, 3, 6, 3);
    const auto sim = sage::compute_similarity_tensor(b.images, b.texts, 1);
    oracle::Cube cube(30, std::vector<std::vector<float>>(3, std::vector<float>(3)));
    for (std::size_t n = 0; n < 30; ++n)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 3; ++i) cube[n][j][i] = sim(n, j, i);
    const auto sep = oracle::separation(cube);
    std::vector<double> mean(3, 0.0), wga(3, 0.0);
    for (int j = 0; j < 3; ++j) {
      for (std::size_t n = 0; n < 30; ++n) mean[j] += sep[n][j];
      mean[j] /= 30.0;
      wga[j] = oracle::evaluate(oracle::predict_vanilla(cube, j), b.labels.class_index,
                                b.labels.group_index, 3)
                   .wga;
    }
    try {
      const auto result = sage::template_correlation(sim, b.labels, 3, 2);
      EXPECT_EQ(result.stats.mean_sep, mean);
      EXPECT_EQ(result.stats.wga, wga);
      EXPECT_DOUBLE_EQ(result.pcc, sage::pearson(mean, wga));
      ++checked;
    } catch (const sage::Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConstantInput);
      EXPECT_TRUE(wga[0] == wga[1] && wga[1] == wga[2]);
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(TemplateCorrelation, IdenticalTemplatesNameIndices) {
  std::mt19937_64 rng(45);
  auto b = support::random_bundle(rng, 10, 2, 2, 4, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    std::copy(b.texts.at(0, i).begin(), b.texts.at(0, i).end(), b.texts.at(1, i).begin());
  }
  const auto sim = sage::compute_similarity_tensor(b.images, b.texts, 1);
  const auto msg = message_of([&] { sage::template_correlation(sim, b.labels, 2, 1); });
  EXPECT_NE(msg.find("templates 0,1"), std::string::npos) << msg;
  EXPECT_EQ(error_of([&] { sage::template_correlation(sim, b.labels, 2, 1); }),
            ErrorCode::kConstantInput);
}

TEST(TemplateCorrelation, NeedsTwoTemplates) {
  std::mt19937_64 rng(46);
  auto b = support::random_bundle(rng, 10, 1, 2, 4, 2);
  const auto sim = sage::compute_similarity_tensor(b.images, b.texts, 1);
  EXPECT_EQ(error_of([&] { sage::template_correlation(sim, b.labels, 2, 1); }),
            ErrorCode::kLengthMismatch);
}

TEST(SelectionFrequency, DegenerateHistogram) {
  sage::Selection sel{4, 1, {5, 5, 5, 5}, {1, 1, 1, 1}};
  const auto stats = sage::selection_frequency(sel, labels_of({0, 1, 1, 0}, {0, 0, 0, 0}), 8, 2);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(stats.frequency[j], j == 5 ? 4u : 0u);
  EXPECT_EQ(stats.class_frequency(0)[5], 2u);
  EXPECT_EQ(stats.class_frequency(1)[5], 2u);
  EXPECT_EQ(sage::rank_by_count(stats.frequency).front(), 5);
}

TEST(SelectionFrequency, CountingIdentities) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 50; ++t) {
    auto b = support::random_bundle(rng, 25, 6, 3, 5, 2);
    const auto sim = sage::compute_similarity_tensor(b.images, b.texts, 1);
    const std::size_t k = support::draw_size(rng, 1, 6);
    const auto sel = sage::select_topk(sage::separation_scores(sim, 1), k, 1);
    const auto stats = sage::selection_frequency(sel, b.labels, 6, 3);
    std::size_t total = 0;
    for (auto f : stats.frequency) total += f;
    EXPECT_EQ(total, 25 * k);
    for (std::size_t i = 0; i < 3; ++i) {
      std::size_t per_class = 0, members = 0;
      for (auto f : stats.class_frequency(i)) per_class += f;
      for (int y : b.labels.class_index) members += std::size_t(y) == i;
      EXPECT_EQ(per_class, members * k);
    }
  }
}

TEST(SelectionFrequency, RankingTiesToLowerIndex) {
  const std::vector<std::size_t> counts = {3, 7, 3, 0, 7};
  EXPECT_EQ(sage::rank_by_count(counts), (std::vector<int>{1, 4, 0, 2, 3}));
}

}  // namespace
