// Copyright 2026 The exitbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// exitbench: startup-exit prediction pipeline driver.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "exitbench/error.hpp"
#include "exitbench/pipeline.hpp"
#include "exitbench/rng.hpp"

namespace {

namespace fs = std::filesystem;
namespace pl = exitbench::pipeline;

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

std::optional<fs::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

struct Globals {
  std::string workdir = "work";
  std::uint64_t seed = 42;
  std::string log_path;
  bool quiet = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exitbench: startup exit prediction benchmark pipeline"};
  app.set_config("--config", "", "key = value config file; flags override it", false);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--workdir", g.workdir, "Directory holding every stage's inputs and outputs")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Root seed; each stage derives its own")->capture_default_str();
  app.add_option("--log", g.log_path, "JSONL run log (default: <workdir>/run_log.jsonl)");
  app.add_flag("--quiet", g.quiet, "Do not print stage summaries");

  std::function<nlohmann::ordered_json()> action;
  std::string stage;

  // synth ------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus of raw CSV tables");
  std::string synth_config_path, synth_out, synth_mode;
  std::optional<std::size_t> synth_n;
  std::optional<double> synth_rate;
  std::size_t synth_bayes = 0;
  synth->add_option("--synth-config", synth_config_path, "Generator parameters (key = value)");
  synth->add_option("--n", synth_n, "Number of companies");
  synth->add_option("--mode", synth_mode, "deterministic-threshold | logistic-sampling");
  synth->add_option("--target-rate", synth_rate, "Solve the intercept for this positive rate");
  synth->add_option("--out", synth_out, "Output directory (default: <workdir>/raw)");
  synth->add_option("--bayes-mc", synth_bayes, "Also estimate Bayes accuracy from this many draws");
  synth->callback([&] {
    stage = "synth";
    action = [&] {
      pl::Layout layout{g.workdir};
      exitbench::SynthConfig base;
      base.seed = exitbench::derive_seed(g.seed, "synth");
      exitbench::SynthConfig config =
          synth_config_path.empty() ? base : exitbench::SynthConfig::load(synth_config_path, base);
      if (synth_n) config.n_companies = *synth_n;
      if (!synth_mode.empty()) config.mode = exitbench::noise_mode_from_name(synth_mode);
      if (synth_rate) config.target_positive_rate = *synth_rate;
      config.validate();
      return pl::run_synth({config, or_default(synth_out, layout.raw()), synth_bayes});
    };
  });

  // ingest -----------------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "Load raw tables, check integrity, normalize");
  std::string ingest_data, ingest_mapping, ingest_out;
  bool ingest_strict = false;
  ingest->add_option("--data", ingest_data, "Raw table directory (default: <workdir>/raw)");
  ingest->add_option("--mapping", ingest_mapping, "Column mapping file");
  ingest->add_flag("--strict", ingest_strict, "Fail on the first malformed row");
  ingest->add_option("--out", ingest_out, "Normalized table directory (default: <workdir>/tables)");
  ingest->callback([&] {
    stage = "ingest";
    action = [&] {
      pl::Layout layout{g.workdir};
      return pl::run_ingest({or_default(ingest_data, layout.raw()),
                             or_default(ingest_out, layout.tables()), layout.integrity(),
                             layout.row_errors(), optional_path(ingest_mapping), ingest_strict});
    };
  });

  // features ---------------------------------------------------------------
  auto* features = app.add_subcommand("features", "Derive one profile per company");
  std::string feat_tables, feat_out, feat_date, feat_titles;
  features->add_option("--tables", feat_tables, "Normalized tables (default: <workdir>/tables)");
  features->add_option("--out", feat_out, "Profiles JSONL (default: <workdir>/profiles.jsonl)");
  features->add_option("--reference-date", feat_date, "Age reference date, YYYY-MM-DD")
      ->default_str(exitbench::kDefaultReferenceDate.iso());
  features->add_option("--executive-titles", feat_titles, "Executive title rules, one per line");
  features->callback([&] {
    stage = "features";
    action = [&] {
      pl::Layout layout{g.workdir};
      pl::FeaturesOptions o;
      o.tables_dir = or_default(feat_tables, layout.tables());
      o.profiles_path = or_default(feat_out, layout.profiles());
      o.profiles_csv_path = fs::path(o.profiles_path).replace_extension(".csv");
      if (!feat_date.empty()) {
        const auto d = exitbench::Date::parse(feat_date);
        if (!d) throw exitbench::UsageError("--reference-date must be YYYY-MM-DD");
        o.reference_date = *d;
      }
      o.executive_titles_path = optional_path(feat_titles);
      return pl::run_features(o);
    };
  });

  // stats ------------------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "Summarize a profile corpus");
  std::string stats_in, stats_out;
  stats->add_option("--profiles", stats_in, "Profiles JSONL (default: <workdir>/profiles.jsonl)");
  stats->add_option("--out", stats_out, "Stats JSON (default: <workdir>/stats.json)");
  stats->callback([&] {
    stage = "stats";
    action = [&] {
      pl::Layout layout{g.workdir};
      return pl::run_stats({or_default(stats_in, layout.profiles()), or_default(stats_out, layout.stats())});
    };
  });

  // split ------------------------------------------------------------------
  auto* split = app.add_subcommand("split", "Split profiles into train/val/test");
  std::string split_in, split_out;
  exitbench::SplitSpec split_spec;
  bool split_no_strat = false, split_balance = false;
  split->add_option("--profiles", split_in, "Profiles JSONL (default: <workdir>/profiles.jsonl)");
  split->add_option("--out", split_out, "Output directory (default: <workdir>/splits)");
  split->add_option("--train", split_spec.train, "Train ratio")->capture_default_str();
  split->add_option("--val", split_spec.val, "Validation ratio")->capture_default_str();
  split->add_option("--test", split_spec.test, "Test ratio")->capture_default_str();
  split->add_flag("--no-stratify", split_no_strat, "Shuffle without per-class dealing");
  split->add_flag("--balance", split_balance, "Undersample the majority class first");
  split->callback([&] {
    stage = "split";
    action = [&] {
      pl::Layout layout{g.workdir};
      pl::SplitOptions o;
      o.profiles_path = or_default(split_in, layout.profiles());
      o.out_dir = or_default(split_out, layout.splits());
      o.spec = split_spec;
      o.spec.seed = exitbench::derive_seed(g.seed, "split");
      o.spec.stratified = !split_no_strat;
      o.balance = split_balance;
      return pl::run_split(o);
    };
  });

  // prompts ----------------------------------------------------------------
  auto* prompts = app.add_subcommand("prompts", "Compile chat records and the training manifest");
  std::string pr_in, pr_out, pr_manifest, pr_variant = "V4", pr_mode = "sft", pr_split, pr_template;
  std::size_t pr_budget = exitbench::kDefaultTokenBudget;
  std::optional<std::size_t> pr_k;
  bool pr_balance = false, pr_no_guard = false, pr_no_desc = false;
  std::vector<std::string> pr_overrides;
  prompts->add_option("--profiles", pr_in, "Profiles JSONL (default: <workdir>/profiles.jsonl)");
  prompts->add_option("--out", pr_out, "Records JSONL (default: <workdir>/prompts.jsonl)");
  prompts->add_option("--manifest", pr_manifest,
                      "Training manifest (default: <workdir>/training_manifest.json)");
  prompts->add_option("--variant", pr_variant, "V1 | V2 | V3 | V4")->capture_default_str();
  prompts->add_option("--mode", pr_mode, "sft | inference")->capture_default_str();
  prompts->add_option("--budget", pr_budget, "Token budget per record")->capture_default_str();
  prompts->add_flag("--balance", pr_balance, "Undersample the majority class");
  prompts->add_option("--fewshot-k", pr_k, "Keep a class-balanced sample of k records");
  prompts->add_option("--split-name", pr_split, "Split tag stored on each record");
  prompts->add_option("--template", pr_template, "Instruction template file for the variant");
  prompts->add_flag("--no-leakage-guard", pr_no_guard, "Keep exit terms in free text");
  prompts->add_flag("--no-description", pr_no_desc, "Omit company descriptions");
  prompts->add_option("--manifest-set", pr_overrides, "Manifest override, dotted.key=value");
  prompts->callback([&] {
    stage = "prompts";
    action = [&] {
      pl::Layout layout{g.workdir};
      pl::PromptsOptions o;
      o.profiles_path = or_default(pr_in, layout.profiles());
      o.out_path = or_default(pr_out, layout.prompts());
      o.manifest_path = or_default(pr_manifest, layout.manifest());
      o.variant = exitbench::variant_from_name(pr_variant);
      o.mode = exitbench::mode_from_name(pr_mode);
      o.budget = pr_budget;
      o.balance = pr_balance;
      o.fewshot_k = pr_k;
      o.seed = exitbench::derive_seed(g.seed, "prompts");
      o.split_name = pr_split;
      o.render.leakage_guard = !pr_no_guard;
      o.render.include_description = !pr_no_desc;
      if (!pr_template.empty()) {
        pl::require_input(pr_template, "template file");
        std::ifstream in(pr_template);
        std::stringstream ss;
        ss << in.rdbuf();
        o.render.templates[o.variant] = ss.str();
      }
      for (const auto& kv : pr_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw exitbench::UsageError("--manifest-set expects key=value");
        o.manifest_overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      return pl::run_prompts(o);
    };
  });

  // train-baseline ---------------------------------------------------------
  auto* train = app.add_subcommand("train-baseline", "Fit the gradient-boosted tree baseline");
  std::string tr_train, tr_test, tr_model, tr_report;
  exitbench::gbdt::GbdtConfig tr_config;
  train->add_option("--train", tr_train, "Training profiles (default: <workdir>/splits/train.jsonl)");
  train->add_option("--test", tr_test, "Test profiles (default: <workdir>/splits/test.jsonl)");
  train->add_option("--model", tr_model, "Model JSON (default: <workdir>/model.json)");
  train->add_option("--report", tr_report, "Report JSON (default: <workdir>/baseline_report.json)");
  train->add_option("--rounds", tr_config.n_rounds, "Boosting rounds")->capture_default_str();
  train->add_option("--max-depth", tr_config.max_depth, "Maximum tree depth")->capture_default_str();
  train->add_option("--learning-rate", tr_config.learning_rate, "Shrinkage")->capture_default_str();
  train->add_option("--lambda", tr_config.lambda, "L2 penalty on leaf weights")->capture_default_str();
  train->add_option("--gamma", tr_config.gamma, "Minimum split gain")->capture_default_str();
  train->add_option("--min-child-weight", tr_config.min_child_weight, "Minimum hessian per child")
      ->capture_default_str();
  train->callback([&] {
    stage = "train-baseline";
    action = [&] {
      pl::Layout layout{g.workdir};
      pl::TrainOptions o;
      o.train_path = or_default(tr_train, layout.splits() / "train.jsonl");
      o.test_path = or_default(tr_test, layout.splits() / "test.jsonl");
      o.model_path = or_default(tr_model, layout.model());
      o.report_path = or_default(tr_report, layout.baseline_report());
      o.config = tr_config;
      o.config.seed = exitbench::derive_seed(g.seed, "train-baseline");
      return pl::run_train_baseline(o);
    };
  });

  // eval-endpoint ----------------------------------------------------------
  auto* eval = app.add_subcommand("eval-endpoint", "Query a chat-completions endpoint and score it");
  std::string ev_prompts, ev_audit, ev_report, ev_fixture, ev_embed_url;
  exitbench::EndpointConfig ev_endpoint;
  std::string ev_regime = "zero-shot";
  eval->add_option("--prompts", ev_prompts, "Records JSONL (default: <workdir>/prompts.jsonl)");
  eval->add_option("--audit", ev_audit, "Audit JSONL (default: <workdir>/audit.jsonl)");
  eval->add_option("--report", ev_report, "Report JSON (default: <workdir>/eval_report.json)");
  eval->add_option("--base-url", ev_endpoint.base_url, "Endpoint base URL")->capture_default_str();
  eval->add_option("--model", ev_endpoint.model, "Model name")->capture_default_str();
  eval->add_option("--api-key-env", ev_endpoint.api_key_env, "Variable holding the API key")
      ->capture_default_str();
  eval->add_option("--temperature", ev_endpoint.temperature, "Sampling temperature")->capture_default_str();
  eval->add_option("--max-tokens", ev_endpoint.max_completion_tokens, "Completion token limit")
      ->capture_default_str();
  eval->add_option("--timeout", ev_endpoint.timeout_seconds, "Request timeout in seconds")
      ->capture_default_str();
  eval->add_option("--max-retries", ev_endpoint.max_retries, "Retries per request")->capture_default_str();
  eval->add_option("--max-in-flight", ev_endpoint.max_in_flight, "Concurrent requests")
      ->capture_default_str();
  eval->add_option("--regime", ev_regime, "zero-shot | fewshot-<k> (recorded in the report)")
      ->capture_default_str();
  eval->add_option("--embeddings-fixture", ev_fixture, "JSONL embedding fixture for BERTScore");
  eval->add_option("--embeddings-url", ev_embed_url, "Embedding endpoint for BERTScore");
  eval->callback([&] {
    stage = "eval-endpoint";
    action = [&] {
      pl::Layout layout{g.workdir};
      pl::EvalEndpointOptions o;
      o.prompts_path = or_default(ev_prompts, layout.prompts());
      o.audit_path = or_default(ev_audit, layout.audit());
      o.report_path = or_default(ev_report, layout.eval_report());
      o.endpoint = ev_endpoint;
      o.regime = ev_regime;
      if (!ev_fixture.empty()) o.embeddings.fixture = ev_fixture;
      if (!ev_embed_url.empty()) o.embeddings.url = ev_embed_url;
      return pl::run_eval_endpoint(o);
    };
  });

  // score ------------------------------------------------------------------
  auto* score = app.add_subcommand("score", "Re-score an audit log offline");
  std::string sc_audit, sc_report, sc_fixture, sc_embed_url;
  score->add_option("--audit", sc_audit, "Audit JSONL (default: <workdir>/audit.jsonl)");
  score->add_option("--report", sc_report, "Report JSON (default: <workdir>/score_report.json)");
  score->add_option("--embeddings-fixture", sc_fixture, "JSONL embedding fixture for BERTScore");
  score->add_option("--embeddings-url", sc_embed_url, "Embedding endpoint for BERTScore");
  score->callback([&] {
    stage = "score";
    action = [&] {
      pl::Layout layout{g.workdir};
      pl::ScoreOptions o;
      o.audit_path = or_default(sc_audit, layout.audit());
      o.report_path = or_default(sc_report, layout.score_report());
      if (!sc_fixture.empty()) o.embeddings.fixture = sc_fixture;
      if (!sc_embed_url.empty()) o.embeddings.url = sc_embed_url;
      return pl::run_score(o);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exitbench::exit_code_for(exitbench::ErrorKind::kUsage);
  }

  const pl::RunLog log(or_default(g.log_path, pl::Layout{g.workdir}.run_log()));
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    const auto counts = action();
    log.record(stage, elapsed(), counts);
    if (!g.quiet) std::cout << counts.dump() << "\n";
    return 0;
  } catch (const exitbench::Error& e) {
    log.record(stage, elapsed(), {{"error", e.what()}}, "error");
    std::cerr << "exitbench " << stage << ": " << e.what() << "\n";
    return exitbench::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    log.record(stage, elapsed(), {{"error", e.what()}}, "error");
    std::cerr << "exitbench " << stage << ": internal error: " << e.what() << "\n";
    return 1;
  }
}
