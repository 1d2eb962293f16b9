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

#include <doctest.h>

#include <map>

#include "exitbench/error.hpp"
#include "exitbench/pipeline.hpp"
#include "fakes.hpp"
#include "support.hpp"

using namespace exitbench;
using namespace exitbench::pipeline;

namespace {

using Snapshot = std::map<std::string, std::string>;

Snapshot snapshot(const fs::path& root) {
  Snapshot s;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) s[fs::relative(e.path(), root).string()] = testsupport::slurp(e.path());
  }
  return s;
}

// Answers "Successful" for every request.
std::shared_ptr<testsupport::ScriptedTransport> always_successful() {
  auto t = std::make_shared<testsupport::ScriptedTransport>();
  t->set_handler([](const std::string&, const std::string&) {
    const std::string body = nlohmann::json{
        {"choices", {{{"message", {{"role", "assistant"},
                                   {"content", "Prediction: Successful\nJustification: ok"}}}}}}}
                                 .dump();
    return HttpResponse{200, body, ""};
  });
  return t;
}

void run_all(const Layout& L) {
  SynthOptions so;
  so.config.n_companies = 300;
  so.config.seed = 11;
  so.out_dir = L.raw();
  run_synth(so);
  run_ingest({L.raw(), L.tables(), L.integrity(), L.row_errors(), std::nullopt, false});
  run_features({L.tables(), L.profiles(), L.profiles_csv(), kDefaultReferenceDate, std::nullopt});
  run_stats({L.profiles(), L.stats()});
  SplitOptions sp;
  sp.profiles_path = L.profiles();
  sp.out_dir = L.splits();
  sp.spec.seed = 4;
  run_split(sp);
  PromptsOptions po;
  po.profiles_path = L.splits() / "test.jsonl";
  po.out_path = L.prompts();
  po.manifest_path = L.manifest();
  po.mode = PromptMode::kInference;
  po.split_name = "test";
  run_prompts(po);
  TrainOptions to;
  to.train_path = L.splits() / "train.jsonl";
  to.test_path = L.splits() / "test.jsonl";
  to.model_path = L.model();
  to.report_path = L.baseline_report();
  to.config.n_rounds = 10;
  run_train_baseline(to);
  EvalEndpointOptions eo;
  eo.prompts_path = L.prompts();
  eo.audit_path = L.audit();
  eo.report_path = L.eval_report();
  eo.endpoint.base_url = "http://127.0.0.1:9/v1";
  eo.transport = always_successful();
  run_eval_endpoint(eo);
  run_score({L.audit(), L.score_report(), {}});
}

}  // namespace

TEST_CASE("stages fail with UsageError when an input is missing") {
  testsupport::TempDir dir("pipe_missing");
  const Layout L{dir.path()};
  CHECK_THROWS_AS(run_ingest({L.raw(), L.tables(), L.integrity(), L.row_errors(), std::nullopt, false}),
                  UsageError);
  CHECK_THROWS_AS(run_features({L.tables(), L.profiles(), L.profiles_csv(), kDefaultReferenceDate, std::nullopt}),
                  UsageError);
  CHECK_THROWS_AS(run_stats({L.profiles(), L.stats()}), UsageError);
  SplitOptions sp;
  sp.profiles_path = L.profiles();
  sp.out_dir = L.splits();
  CHECK_THROWS_AS(run_split(sp), UsageError);
  PromptsOptions po;
  po.profiles_path = L.profiles();
  CHECK_THROWS_AS(run_prompts(po), UsageError);
  TrainOptions to;
  to.train_path = L.splits() / "train.jsonl";
  CHECK_THROWS_AS(run_train_baseline(to), UsageError);
  EvalEndpointOptions eo;
  eo.prompts_path = L.prompts();
  CHECK_THROWS_AS(run_eval_endpoint(eo), UsageError);
  CHECK_THROWS_AS(run_score({L.audit(), L.score_report(), {}}), UsageError);
  // Nothing was created along the way.
  CHECK(snapshot(dir.path()).empty());
}

TEST_CASE("full pipeline: outputs exist, reruns are byte-identical, inputs untouched") {
  testsupport::TempDir a("pipe_a"), b("pipe_b");
  const Layout La{a.path()}, Lb{b.path()};
  run_all(La);
  const auto first = snapshot(a.path());
  for (const auto& p : {La.integrity(), La.row_errors(), La.profiles(), La.profiles_csv(), La.stats(),
                        La.prompts(), La.manifest(), La.model(), La.baseline_report(), La.audit(),
                        La.eval_report(), La.score_report()}) {
    CHECK_MESSAGE(fs::exists(p), p.string());
  }

  // Re-running downstream stages must not modify their inputs.
  const auto raw_before = snapshot(La.raw());
  const auto tables_before = snapshot(La.tables());
  run_ingest({La.raw(), La.tables(), La.integrity(), La.row_errors(), std::nullopt, false});
  run_features({La.tables(), La.profiles(), La.profiles_csv(), kDefaultReferenceDate, std::nullopt});
  CHECK(snapshot(La.raw()) == raw_before);
  CHECK(snapshot(La.tables()) == tables_before);

  run_all(Lb);
  auto second = snapshot(b.path());
  auto first_cmp = first;
  // Audit lines carry wall-clock latencies.
  first_cmp.erase("audit.jsonl");
  second.erase("audit.jsonl");
  CHECK(first_cmp.size() == second.size());
  for (const auto& [name, bytes] : first_cmp) {
    CHECK_MESSAGE(second[name] == bytes, name);
  }

  const auto score = nlohmann::json::parse(first.at("score_report.json"));
  const auto eval = nlohmann::json::parse(first.at("eval_report.json"));
  CHECK(score["accuracy"] == eval["accuracy"]);
  CHECK(score["records"] == eval["records"]);
  CHECK(eval["regime"] == "zero-shot");
}

TEST_CASE("run log and atomic writes") {
  testsupport::TempDir dir("pipe_log");
  RunLog log(dir / "run_log.jsonl");
  log.record("synth", 1.5, {{"companies", 3}});
  log.record("ingest", 2.0, {{"rows", 9}}, "failed");
  const auto text = testsupport::slurp(dir / "run_log.jsonl");
  CHECK(testsupport::count_substr(text, "\n") == 2);
  const auto second = nlohmann::json::parse(text.substr(text.find('\n') + 1));
  CHECK(second["stage"] == "ingest");
  CHECK(second["status"] == "failed");
  CHECK(second["counts"]["rows"] == 9);

  write_text_file(dir / "sub" / "x.txt", "hello");
  CHECK(testsupport::slurp(dir / "sub" / "x.txt") == "hello");
  CHECK_FALSE(fs::exists(dir / "sub" / "x.txt.tmp"));
}
