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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "exitbench/feature_engine.hpp"
#include "exitbench/gbdt.hpp"
#include "exitbench/llm_client.hpp"
#include "exitbench/prompt_compiler.hpp"
#include "exitbench/synth_corpus.hpp"

// Subcommand bodies behind the `exitbench` CLI. Every stage reads declared
// inputs under a work directory, writes declared outputs, and never touches
// its inputs. A missing input is a UsageError.
namespace exitbench::pipeline {

namespace fs = std::filesystem;

// Default file layout under the work directory.
struct Layout {
  fs::path workdir = "work";

  fs::path raw() const { return workdir / "raw"; }
  fs::path tables() const { return workdir / "tables"; }
  fs::path integrity() const { return workdir / "integrity.json"; }
  fs::path row_errors() const { return workdir / "row_errors.jsonl"; }
  fs::path profiles() const { return workdir / "profiles.jsonl"; }
  fs::path profiles_csv() const { return workdir / "profiles.csv"; }
  fs::path stats() const { return workdir / "stats.json"; }
  fs::path splits() const { return workdir / "splits"; }
  fs::path prompts() const { return workdir / "prompts.jsonl"; }
  fs::path manifest() const { return workdir / "training_manifest.json"; }
  fs::path model() const { return workdir / "model.json"; }
  fs::path baseline_report() const { return workdir / "baseline_report.json"; }
  fs::path audit() const { return workdir / "audit.jsonl"; }
  fs::path eval_report() const { return workdir / "eval_report.json"; }
  fs::path score_report() const { return workdir / "score_report.json"; }
  fs::path run_log() const { return workdir / "run_log.jsonl"; }
};

// Appends one JSON object per stage to the run log.
class RunLog {
 public:
  explicit RunLog(fs::path path) : path_(std::move(path)) {}
  void record(const std::string& stage, double duration_ms, const nlohmann::ordered_json& counts,
              const std::string& status = "ok") const;

 private:
  fs::path path_;
};

struct SynthOptions {
  SynthConfig config;
  fs::path out_dir;
  std::size_t bayes_mc = 0;  // also estimate Bayes accuracy when > 0
};
nlohmann::ordered_json run_synth(const SynthOptions& o);

struct IngestOptions {
  fs::path data_dir;
  fs::path out_dir;  // normalized tables (identity mapping)
  fs::path integrity_path;
  fs::path row_errors_path;
  std::optional<fs::path> mapping_path;
  bool strict = false;
};
nlohmann::ordered_json run_ingest(const IngestOptions& o);

struct FeaturesOptions {
  fs::path tables_dir;
  fs::path profiles_path;
  fs::path profiles_csv_path;
  Date reference_date = kDefaultReferenceDate;
  std::optional<fs::path> executive_titles_path;
};
nlohmann::ordered_json run_features(const FeaturesOptions& o);

struct StatsOptions {
  fs::path profiles_path;
  fs::path out_path;
};
nlohmann::ordered_json run_stats(const StatsOptions& o);

struct SplitOptions {
  fs::path profiles_path;
  fs::path out_dir;
  SplitSpec spec;
  bool balance = false;  // undersample before splitting
};
nlohmann::ordered_json run_split(const SplitOptions& o);

struct PromptsOptions {
  fs::path profiles_path;
  fs::path out_path;
  fs::path manifest_path;
  PromptVariant variant = PromptVariant::kV4;
  PromptMode mode = PromptMode::kSft;
  std::size_t budget = kDefaultTokenBudget;
  bool balance = false;
  std::optional<std::size_t> fewshot_k;
  std::uint64_t seed = 0;
  std::string split_name;
  RenderOptions render;
  std::map<std::string, std::string> manifest_overrides;
};
nlohmann::ordered_json run_prompts(const PromptsOptions& o);

struct TrainOptions {
  fs::path train_path;
  fs::path test_path;
  fs::path model_path;
  fs::path report_path;
  gbdt::GbdtConfig config;
};
nlohmann::ordered_json run_train_baseline(const TrainOptions& o);

struct EmbeddingOptions {
  std::optional<fs::path> fixture;
  std::optional<std::string> url;
};

struct EvalEndpointOptions {
  fs::path prompts_path;
  fs::path audit_path;
  fs::path report_path;
  EndpointConfig endpoint;
  std::string regime = "zero-shot";
  EmbeddingOptions embeddings;
  std::shared_ptr<HttpTransport> transport;  // tests inject fakes here
};
nlohmann::ordered_json run_eval_endpoint(const EvalEndpointOptions& o);

struct ScoreOptions {
  fs::path audit_path;
  fs::path report_path;
  EmbeddingOptions embeddings;
};
nlohmann::ordered_json run_score(const ScoreOptions& o);

// Throws UsageError naming `what` when `path` does not exist.
void require_input(const fs::path& path, const std::string& what);

// Writes `text` to `path` via a sibling temporary and a rename.
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace exitbench::pipeline
