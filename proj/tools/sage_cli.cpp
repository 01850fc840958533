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

// sage: command-line front end.
//
//   sage predict   BUNDLE --out DIR [--variant V] [--k K] [--template J]
//                  [--seed S] [--runs R] [--random-scope image|dataset] [--cache-sim]
//   sage ablate    BUNDLE --out DIR [--ks 1,5,20,40,80] [--seed S] [--runs R]
//   sage correlate BUNDLE --out DIR
//   sage freq      BUNDLE --out DIR [--k K]
//   sage synth     --preset theorem|ladder|clean --out DIR [--seed S]
//
// Exit codes: 0 ok, 2 configuration, 3 data, 4 metric domain. Errors are a
// single stderr line: "sage: error=<Code> msg=<text>".

#include <array>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sage/sage.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitMetric = 4;

void warn(const std::string& code, const std::string& msg) {
  std::cerr << "sage: warning=" << code << " msg=" << msg << "\n";
}

int report_error(const std::string& code, const std::string& msg, int exit_code) {
  std::string flat = msg;
  for (char& ch : flat) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  std::cerr << "sage: error=" << code << " msg=" << flat << "\n";
  return exit_code;
}

[[noreturn]] void config_error(const std::string& msg) {
  sage::fail(sage::ErrorCode::kConfigError, msg);
}

struct Options {
  std::string bundle;
  std::string out;
  std::string variant = "sage";
  std::size_t k = 1;
  int template_index = -1;
  std::uint64_t seed = 0;
  int runs = 3;
  std::string random_scope = "image";
  bool cache_sim = false;
  std::string ks = "1,5,20,40,80";
  std::string preset;
};

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) config_error("--ks contains an empty entry");
    std::size_t consumed = 0;
    long long value = 0;
    try {
      value = std::stoll(item, &consumed);
    } catch (const std::exception&) {
      config_error("--ks entry '" + item + "' is not an integer");
    }
    if (consumed != item.size()) config_error("--ks entry '" + item + "' is not an integer");
    if (value < 1) {
      sage::fail(sage::ErrorCode::kKOutOfRange, "--ks entry " + item + " must be >= 1");
    }
    ks.push_back(static_cast<std::size_t>(value));
  }
  if (ks.empty()) config_error("--ks is empty");
  return ks;
}

sage::RandomScope parse_scope(const std::string& text) {
  if (text == "image") return sage::RandomScope::kImage;
  if (text == "dataset") return sage::RandomScope::kDataset;
  config_error("--random-scope must be image or dataset, got '" + text + "'");
}

void write_file(const fs::path& path, const std::string& content) {
  sage::detail::write_text_file(path, content);
}

void prepare_out(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) sage::fail(sage::ErrorCode::kIoError, "cannot create " + out.string() + ": " + ec.message());
}

void warn_empty_groups(const sage::EvalReport& r, const sage::DatasetManifest& m) {
  for (int g : r.empty_groups) {
    warn("EmptyGroup", "group '" + m.groups[static_cast<std::size_t>(g)] +
                           "' has no samples and is excluded from wga");
  }
}

std::string summary_line(const sage::EvalReport& r) {
  return r.variant.tag() + (r.runs > 1 ? " runs=" + std::to_string(r.runs) : "") +
         " avg=" + sage::format_percent(r.avg) + " wga=" + sage::format_percent(r.wga) +
         " hm=" + sage::format_percent(r.hm);
}

ordered_json config_echo(const std::string& command, const Options& o) {
  ordered_json j;
  j["command"] = command;
  j["bundle"] = o.bundle;
  return j;
}

sage::SimilarityTensor similarity_for(const sage::Bundle& b, const Options& o) {
  auto sim = sage::compute_similarity_tensor(b.images, b.texts);
  if (o.cache_sim) {
    const std::array<std::size_t, 3> shape = {sim.images, sim.templates, sim.classes};
    sage::npy::write(fs::path(o.bundle) / "sim_cache.npy", shape, sim.data);
  }
  return sim;
}

int cmd_predict(const Options& o, const CLI::App& sub) {
  const bool given_k = sub.count("--k") > 0;
  const bool given_template = sub.count("--template") > 0;
  const bool given_random = sub.count("--seed") + sub.count("--runs") + sub.count("--random-scope") > 0;
  const std::string& v = o.variant;
  if (v != "sage" && v != "vanilla" && v != "ensemble" && v != "random") {
    config_error("--variant must be sage, vanilla, ensemble or random, got '" + v + "'");
  }
  if (v == "vanilla" && !given_template) config_error("--variant vanilla requires --template");
  if (v != "vanilla" && given_template) config_error("--template applies only to --variant vanilla");
  if ((v == "vanilla" || v == "ensemble") && given_k) {
    config_error("--k does not apply to --variant " + v);
  }
  if (v != "random" && given_random) {
    config_error("--seed, --runs and --random-scope apply only to --variant random");
  }
  if (o.runs < 1) config_error("--runs must be >= 1");
  if (o.k < 1) sage::fail(sage::ErrorCode::kKOutOfRange, "--k must be >= 1");
  const auto scope = parse_scope(o.random_scope);

  const sage::Bundle b = sage::load_bundle(o.bundle);
  const std::size_t m = b.manifest.templates.size();
  if ((v == "sage" || v == "random") && o.k > m) {
    sage::fail(sage::ErrorCode::kKOutOfRange,
               "--k " + std::to_string(o.k) + " exceeds template count " + std::to_string(m));
  }
  if (v == "vanilla" && (o.template_index < 0 || static_cast<std::size_t>(o.template_index) >= m)) {
    sage::fail(sage::ErrorCode::kIndexOutOfRange, "--template " + std::to_string(o.template_index) +
                                                      " outside [0, " + std::to_string(m) + ")");
  }

  const auto sim = similarity_for(b, o);
  std::vector<sage::PredictionSet> sets;
  if (v == "sage") {
    sets.push_back(sage::predict_sage(sim, sage::select_topk(sage::separation_scores(sim), o.k)));
  } else if (v == "vanilla") {
    sets.push_back(sage::predict_vanilla(sim, o.template_index));
  } else if (v == "ensemble") {
    sets.push_back(sage::predict_ensemble(sim));
  } else {
    sets = sage::predict_random(sim, o.k, o.seed, o.runs, scope);
  }

  const fs::path out(o.out);
  prepare_out(out);
  std::string predictions;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const std::string block = sage::predictions_csv(sets[s], b.labels, b.manifest);
    predictions += s == 0 ? block : block.substr(block.find('\n') + 1);
  }
  write_file(out / "predictions.csv", predictions);

  ordered_json report;
  report["config"] = config_echo("predict", o);
  report["config"]["variant"] = sage::variant_json(sets.front().variant);
  if (v == "random") report["config"]["runs"] = o.runs;

  if (b.labels.size() == 0) {
    warn("EmptyBundle", "bundle has no samples; reports are empty");
    report["empty"] = true;
    report["results"] = ordered_json::array();
    write_file(out / "report.json", report.dump(2) + "\n");
    write_file(out / "report.csv", sage::summary_csv({}));
    std::cout << "empty bundle: no samples evaluated\n";
    return kExitOk;
  }

  std::vector<sage::EvalReport> evals;
  for (const auto& set : sets) evals.push_back(sage::evaluate(set, b.labels, b.manifest));
  warn_empty_groups(evals.front(), b.manifest);
  report["empty"] = false;
  auto results = ordered_json::array();
  for (const auto& e : evals) results.push_back(sage::eval_report_json(e, b.manifest));
  report["results"] = results;
  std::vector<sage::EvalReport> summary;
  if (v == "random") {
    const auto agg = sage::aggregate_runs(evals);
    report["aggregate"] = sage::eval_report_json(agg, b.manifest);
    summary.push_back(agg);
  } else {
    summary.push_back(evals.front());
  }
  write_file(out / "report.json", report.dump(2) + "\n");
  write_file(out / "report.csv", sage::summary_csv(summary));
  std::cout << summary_line(summary.front()) << "\n";
  return kExitOk;
}

int cmd_ablate(const Options& o, const CLI::App& sub) {
  (void)sub;
  const auto ks = parse_ks(o.ks);
  if (o.runs < 1) config_error("--runs must be >= 1");

  const sage::Bundle b = sage::load_bundle(o.bundle);
  const std::size_t m = b.manifest.templates.size();
  std::vector<std::size_t> usable;
  for (std::size_t k : ks) {
    if (k > m) {
      warn("SkippedK", "k=" + std::to_string(k) + " exceeds template count " + std::to_string(m));
    } else {
      usable.push_back(k);
    }
  }
  const auto sim = similarity_for(b, o);
  const fs::path out(o.out);
  prepare_out(out);
  if (b.labels.size() == 0) {
    warn("EmptyBundle", "bundle has no samples; ablation is empty");
    write_file(out / "ablation.csv", sage::ablation_csv({}));
    std::cout << "empty bundle: no samples evaluated\n";
    return kExitOk;
  }

  const auto sep = sage::separation_scores(sim);
  std::vector<sage::AblationRow> rows;
  for (std::size_t k : usable) {
    const auto preds = sage::predict_sage(sim, sage::select_topk(sep, k));
    rows.push_back({"sage", k, sage::evaluate(preds, b.labels, b.manifest)});
  }
  for (std::size_t k : usable) {
    std::vector<sage::EvalReport> runs;
    for (const auto& set : sage::predict_random(sim, k, o.seed, o.runs)) {
      runs.push_back(sage::evaluate(set, b.labels, b.manifest));
    }
    rows.push_back({"random", k, sage::aggregate_runs(runs)});
  }
  rows.push_back({"ensemble", m, sage::evaluate(sage::predict_ensemble(sim), b.labels, b.manifest)});
  warn_empty_groups(rows.back().report, b.manifest);
  write_file(out / "ablation.csv", sage::ablation_csv(rows));
  for (const auto& row : rows) {
    std::cout << row.variant << " k=" << row.k << " avg=" << sage::format_percent(row.report.avg)
              << " wga=" << sage::format_percent(row.report.wga)
              << " hm=" << sage::format_percent(row.report.hm) << "\n";
  }
  return kExitOk;
}

int cmd_correlate(const Options& o) {
  const sage::Bundle b = sage::load_bundle(o.bundle);
  const auto sim = similarity_for(b, o);
  const auto result = sage::template_correlation(sim, b.labels, b.manifest.groups.size());
  const fs::path out(o.out);
  prepare_out(out);
  write_file(out / "correlation.csv", sage::correlation_csv(result.stats, b.manifest));
  std::cout << "pcc=" << sage::format_double(result.pcc) << " templates=" << result.stats.templates
            << " mean_sep_aggregate=mean\n";
  return kExitOk;
}

int cmd_freq(const Options& o) {
  if (o.k < 1) sage::fail(sage::ErrorCode::kKOutOfRange, "--k must be >= 1");
  const sage::Bundle b = sage::load_bundle(o.bundle);
  const auto sim = similarity_for(b, o);
  const auto selection = sage::select_topk(sage::separation_scores(sim), o.k);
  const auto stats = sage::selection_frequency(selection, b.labels, b.manifest.templates.size(),
                                               b.manifest.classes.size());
  const fs::path out(o.out);
  prepare_out(out);
  write_file(out / "freq.csv", sage::frequency_csv(stats, b.manifest));
  const auto order = sage::rank_by_count(stats.frequency);
  if (!order.empty() && b.labels.size() > 0) {
    const auto top = static_cast<std::size_t>(order.front());
    std::cout << "top template " << top << " \"" << b.manifest.templates[top]
              << "\" selected " << stats.frequency[top] << " times\n";
  } else {
    std::cout << "no selections\n";
  }
  return kExitOk;
}

int cmd_synth(const Options& o) {
  sage::SynthConfig cfg = sage::synth_preset(o.preset);
  cfg.seed = o.seed;
  const auto world = sage::generate(cfg);
  sage::write_synth_world(world, o.out);
  std::cout << "synth preset=" << o.preset << " seed=" << o.seed
            << " images=" << world.bundle.images.rows << " templates=" << cfg.m()
            << " dim=" << cfg.d << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spuriousness-aware zero-shot template selection"};
  app.require_subcommand(1);
  Options o;

  auto* predict = app.add_subcommand("predict", "Predict and evaluate one variant");
  predict->add_option("bundle", o.bundle, "Bundle directory")->required();
  predict->add_option("--out", o.out, "Output directory")->required();
  predict->add_option("--variant", o.variant, "sage | vanilla | ensemble | random");
  predict->add_option("--k", o.k, "Templates per image (sage, random)");
  predict->add_option("--template", o.template_index, "Template index (vanilla)");
  predict->add_option("--seed", o.seed, "Random seed (random)");
  predict->add_option("--runs", o.runs, "Number of runs (random)");
  predict->add_option("--random-scope", o.random_scope, "image | dataset (random)");
  predict->add_flag("--cache-sim", o.cache_sim, "Write sim_cache.npy next to the bundle");

  auto* ablate = app.add_subcommand("ablate", "Sweep K for sage and random selection");
  ablate->add_option("bundle", o.bundle, "Bundle directory")->required();
  ablate->add_option("--out", o.out, "Output directory")->required();
  ablate->add_option("--ks", o.ks, "Comma-separated K values");
  ablate->add_option("--seed", o.seed, "Random seed");
  ablate->add_option("--runs", o.runs, "Random runs per K");
  ablate->add_flag("--cache-sim", o.cache_sim, "Write sim_cache.npy next to the bundle");

  auto* correlate = app.add_subcommand("correlate", "Mean separation vs single-template WGA");
  correlate->add_option("bundle", o.bundle, "Bundle directory")->required();
  correlate->add_option("--out", o.out, "Output directory")->required();
  correlate->add_flag("--cache-sim", o.cache_sim, "Write sim_cache.npy next to the bundle");

  auto* freq = app.add_subcommand("freq", "Template selection frequency");
  freq->add_option("bundle", o.bundle, "Bundle directory")->required();
  freq->add_option("--out", o.out, "Output directory")->required();
  freq->add_option("--k", o.k, "Templates per image");
  freq->add_flag("--cache-sim", o.cache_sim, "Write sim_cache.npy next to the bundle");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic bias world");
  synth->add_option("--preset", o.preset, "theorem | ladder | clean")->required();
  synth->add_option("--out", o.out, "Output bundle directory")->required();
  synth->add_option("--seed", o.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("ConfigError", e.what(), kExitConfig);
  }

  try {
    (void)sage::worker_count();
    if (predict->parsed()) return cmd_predict(o, *predict);
    if (ablate->parsed()) return cmd_ablate(o, *ablate);
    if (correlate->parsed()) return cmd_correlate(o);
    if (freq->parsed()) return cmd_freq(o);
    if (synth->parsed()) return cmd_synth(o);
  } catch (const sage::Error& e) {
    const int code = [&] {
      switch (sage::error_category(e.code())) {
        case sage::ErrorCategory::kConfig: return kExitConfig;
        case sage::ErrorCategory::kData: return kExitData;
        case sage::ErrorCategory::kMetricDomain: return kExitMetric;
      }
      return kExitInternal;
    }();
    return report_error(std::string(sage::error_code_name(e.code())), e.what(), code);
  } catch (const fs::filesystem_error& e) {
    return report_error("IoError", e.what(), kExitData);
  } catch (const std::exception& e) {
    return report_error("Internal", e.what(), kExitInternal);
  }
  return kExitInternal;
}
