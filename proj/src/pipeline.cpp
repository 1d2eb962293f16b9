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

#include "exitbench/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "exitbench/error.hpp"
#include "exitbench/metrics.hpp"
#include "exitbench/schema_ingest.hpp"
#include "exitbench/token_counter.hpp"

namespace exitbench::pipeline {
namespace {

using ordered_json = nlohmann::ordered_json;

void ensure_parent(const fs::path& path) {
  if (!path.has_parent_path()) return;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::size_t count_positive(const std::vector<CompanyProfile>& ps) {
  std::size_t n = 0;
  for (const auto& p : ps) n += static_cast<std::size_t>(p.success);
  return n;
}

std::unique_ptr<EmbeddingCache> make_embeddings(const EmbeddingOptions& o) {
  if (o.fixture && o.url) throw UsageError("choose either an embedding fixture or an embedding URL");
  if (o.fixture) {
    require_input(*o.fixture, "embedding fixture");
    return std::make_unique<EmbeddingCache>(std::make_shared<FixtureEmbeddingProvider>(*o.fixture));
  }
  if (o.url) {
    return std::make_unique<EmbeddingCache>(std::make_shared<HttpEmbeddingProvider>(
        *o.url, nullptr, RetryPolicy{}, std::chrono::seconds(60)));
  }
  return nullptr;
}

}  // namespace

void RunLog::record(const std::string& stage, double duration_ms, const ordered_json& counts,
                    const std::string& status) const {
  if (path_.empty()) return;
  ensure_parent(path_);
  std::ofstream out(path_, std::ios::app);
  if (!out) return;  // logging never fails a stage
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char ts[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", &tm);
  ordered_json j = {{"ts", ts}, {"stage", stage}, {"status", status},
                    {"duration_ms", duration_ms}, {"counts", counts}};
  out << j.dump() << "\n";
}

void require_input(const fs::path& path, const std::string& what) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw UsageError("missing input: " + what + " (" + path.string() +
                     "); run the stage that produces it first");
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

ordered_json run_synth(const SynthOptions& o) {
  const SynthCorpus corpus = generate(o.config, o.out_dir);
  std::size_t positives = 0;
  for (const auto& g : corpus.ground_truth) positives += static_cast<std::size_t>(g.label);
  ordered_json j = {{"companies", corpus.ground_truth.size()},
                    {"positives", positives},
                    {"ipos", corpus.tables.ipos.size()},
                    {"acquisitions", corpus.tables.acquisitions.size()},
                    {"funding_rounds", corpus.tables.funding_rounds.size()},
                    {"intercept", corpus.intercept}};
  if (o.bayes_mc > 0) {
    const auto b = estimate_bayes_accuracy(o.config, o.bayes_mc);
    j["bayes_accuracy"] = b.accuracy;
    j["bayes_standard_error"] = b.standard_error;
  }
  return j;
}

ordered_json run_ingest(const IngestOptions& o) {
  require_input(o.data_dir, "raw table directory");
  require_input(o.data_dir / "organizations.csv", "organizations table");
  ColumnMapping mapping = ColumnMapping::crunchbase_defaults();
  if (o.mapping_path) {
    require_input(*o.mapping_path, "column mapping");
    mapping = ColumnMapping::load(*o.mapping_path);
  }
  TablesLoad loaded = load_tables(o.data_dir, mapping, LoadOptions{o.strict});
  const CompanyStore store(loaded.tables);

  ensure_dir(o.out_dir);
  write_tables(o.out_dir, store.tables(), ColumnMapping::identity());
  write_text_file(o.integrity_path, store.integrity().to_json().dump(2) + "\n");

  std::string errors;
  for (const auto& [kind, list] : loaded.errors) {
    for (const auto& e : list) {
      errors += ordered_json{{"table", table_name(kind)}, {"line", e.line}, {"reason", e.reason}}.dump();
      errors += "\n";
    }
  }
  write_text_file(o.row_errors_path, errors);

  const Tables& t = store.tables();
  return {{"organizations", t.organizations.size()},
          {"funding_rounds", t.funding_rounds.size()},
          {"investments", t.investments.size()},
          {"ipos", t.ipos.size()},
          {"acquisitions", t.acquisitions.size()},
          {"jobs", t.jobs.size()},
          {"row_errors", loaded.error_count()},
          {"integrity_warnings", store.integrity().total()}};
}

ordered_json run_features(const FeaturesOptions& o) {
  require_input(o.tables_dir / "organizations.csv", "ingested tables (run `ingest` first)");
  TablesLoad loaded = load_tables(o.tables_dir, ColumnMapping::identity(), LoadOptions{true});
  const CompanyStore store(std::move(loaded.tables));
  DeriveOptions opts;
  opts.reference_date = o.reference_date;
  if (o.executive_titles_path) {
    require_input(*o.executive_titles_path, "executive title rules");
    opts.executive_titles = ExecutiveTitles::load(*o.executive_titles_path);
  }
  const auto profiles = derive_profiles(store, opts);
  ensure_parent(o.profiles_path);
  write_profiles_jsonl(o.profiles_path, profiles);
  write_profiles_csv(o.profiles_csv_path, profiles);
  std::size_t anomalies = 0;
  for (const auto& p : profiles) anomalies += static_cast<std::size_t>(p.age_anomaly);
  return {{"profiles", profiles.size()}, {"positives", count_positive(profiles)},
          {"age_anomalies", anomalies}};
}

ordered_json run_stats(const StatsOptions& o) {
  require_input(o.profiles_path, "profiles (run `features` first)");
  const auto profiles = read_profiles_jsonl(o.profiles_path);
  const auto stats = corpus_stats(profiles, default_token_count);
  const auto j = stats.to_json();
  write_text_file(o.out_path, j.dump(2) + "\n");
  return {{"profiles", stats.size}, {"positive_ratio", stats.positive_ratio}};
}

ordered_json run_split(const SplitOptions& o) {
  require_input(o.profiles_path, "profiles (run `features` first)");
  auto profiles = read_profiles_jsonl(o.profiles_path);
  if (o.balance) profiles = balance_dataset(profiles, derive_seed(o.spec.seed, "balance"));
  const Splits s = split(profiles, o.spec);
  ensure_dir(o.out_dir);
  write_profiles_jsonl(o.out_dir / "train.jsonl", s.train);
  write_profiles_jsonl(o.out_dir / "val.jsonl", s.val);
  write_profiles_jsonl(o.out_dir / "test.jsonl", s.test);
  return {{"train", s.train.size()}, {"val", s.val.size()}, {"test", s.test.size()},
          {"train_positives", count_positive(s.train)}, {"test_positives", count_positive(s.test)}};
}

ordered_json run_prompts(const PromptsOptions& o) {
  require_input(o.profiles_path, "profiles (run `features` or `split` first)");
  auto profiles = read_profiles_jsonl(o.profiles_path);
  if (o.balance) profiles = balance_dataset(profiles, derive_seed(o.seed, "balance"));

  std::vector<SftRecord> records;
  records.reserve(profiles.size());
  std::size_t truncated = 0;
  for (const auto& p : profiles) {
    SftRecord r = render_prompt(p, o.variant, o.mode, {}, o.render);
    r.chat.metadata.split = o.split_name;
    SftRecord fitted = enforce_budget(r, o.budget, default_token_count);
    truncated += static_cast<std::size_t>(!(fitted == r));
    records.push_back(std::move(fitted));
  }
  if (o.fewshot_k) records = sample_fewshot(records, *o.fewshot_k, derive_seed(o.seed, "fewshot"));

  ensure_parent(o.out_path);
  const std::size_t written = emit_jsonl(records, o.out_path);
  write_text_file(o.manifest_path, emit_training_manifest(o.manifest_overrides));
  std::size_t positives = 0;
  for (const auto& r : records) positives += static_cast<std::size_t>(r.target_label);
  return {{"records", written}, {"positives", positives}, {"truncated", truncated},
          {"variant", variant_name(o.variant)}, {"mode", mode_name(o.mode)}};
}

ordered_json run_train_baseline(const TrainOptions& o) {
  require_input(o.train_path, "training split (run `split` first)");
  require_input(o.test_path, "test split (run `split` first)");
  const auto train = read_profiles_jsonl(o.train_path);
  const auto test = read_profiles_jsonl(o.test_path);
  if (test.empty()) throw DataError("test split is empty");
  const Eigen::MatrixXd X = feature_matrix(train);
  const Eigen::VectorXi y = label_vector(train);
  gbdt::GbdtModel model = gbdt::fit(X, y, o.config);
  for (const auto& name : kFeatureNames) model.feature_names.emplace_back(name);
  ensure_parent(o.model_path);
  gbdt::save(model, o.model_path);

  auto score = [&](const std::vector<CompanyProfile>& ps) {
    const Eigen::VectorXi pred = gbdt::predict_rows(model, feature_matrix(ps));
    const Eigen::VectorXi truth = label_vector(ps);
    return report(confusion(std::span<const int>(pred.data(), static_cast<std::size_t>(pred.size())),
                            std::span<const int>(truth.data(), static_cast<std::size_t>(truth.size()))));
  };
  const auto train_report = score(train);
  const auto test_report = score(test);
  ordered_json j = {{"model", "gbdt"},
                    {"trees", model.trees.size()},
                    {"train", train_report.to_json()},
                    {"test", test_report.to_json()}};
  write_text_file(o.report_path, j.dump(2) + "\n");
  return {{"train_size", train.size()}, {"test_size", test.size()},
          {"test_accuracy", test_report.accuracy}, {"test_f1", test_report.f1_positive}};
}

ordered_json run_eval_endpoint(const EvalEndpointOptions& o) {
  require_input(o.prompts_path, "prompt records (run `prompts` first)");
  const auto records = read_records_jsonl(o.prompts_path);
  if (records.empty()) throw DataError("no prompt records in " + o.prompts_path.string());
  const ChatClient client(o.endpoint, o.transport);
  auto embeddings = make_embeddings(o.embeddings);

  ensure_parent(o.audit_path);
  std::ofstream audit(o.audit_path, std::ios::binary);
  if (!audit) throw IoError("cannot write " + o.audit_path.string());
  EvalOptions eo;
  eo.max_in_flight = o.endpoint.max_in_flight;
  eo.embeddings = embeddings.get();
  eo.audit_sink = [&audit](const ordered_json& line) { audit << line.dump() << "\n"; };
  const EvalRun run = run_eval(client, records, eo);
  audit.close();
  if (!audit) throw IoError("failed writing " + o.audit_path.string());

  ordered_json j = {{"regime", o.regime}, {"model", o.endpoint.model}};
  j.update(run.summary_json());
  write_text_file(o.report_path, j.dump(2) + "\n");
  return {{"records", run.outcomes.size()}, {"accuracy", run.report.accuracy},
          {"f1", run.report.f1_positive}, {"unparseable", run.unparseable},
          {"transport_failures", run.transport_failures}};
}

ordered_json run_score(const ScoreOptions& o) {
  require_input(o.audit_path, "audit log (run `eval-endpoint` first)");
  const auto lines = read_audit_log(o.audit_path);
  auto embeddings = make_embeddings(o.embeddings);
  const EvalRun run = rescore_audit(lines, embeddings.get());
  write_text_file(o.report_path, run.summary_json().dump(2) + "\n");
  return {{"records", run.outcomes.size()}, {"accuracy", run.report.accuracy},
          {"f1", run.report.f1_positive}, {"unparseable", run.unparseable}};
}

}  // namespace exitbench::pipeline
