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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "exitbench/bertscore.hpp"
#include "exitbench/error.hpp"
#include "exitbench/feature_engine.hpp"
#include "exitbench/gbdt.hpp"
#include "exitbench/llm_client.hpp"
#include "exitbench/metrics.hpp"
#include "exitbench/mock_endpoint.hpp"
#include "exitbench/pipeline.hpp"
#include "exitbench/prompt_compiler.hpp"
#include "exitbench/rng.hpp"
#include "exitbench/schema_ingest.hpp"
#include "exitbench/synth_corpus.hpp"
#include "exitbench/text.hpp"
#include "exitbench/token_counter.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace exitbench;
namespace pl = exitbench::pipeline;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failed expectations for one criterion.
class Verdict {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool passed() const { return failed_ == 0; }
  std::string detail() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < notes_.size(); ++i) out << (i ? "; " : "") << notes_[i];
    if (failed_) {
      out << (notes_.empty() ? "" : "; ") << failed_ << " failed check(s):";
      for (const auto& f : failures_) out << " [" << f << "]";
    }
    return out.str();
  }

 private:
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << v;
  return out.str();
}

// ---------------------------------------------------------------------------

void metric_oracle(Verdict& v) {
  const auto t0 = Clock::now();
  Rng rng(20250611);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = 1 + rng.index(200);
    std::vector<int> p(n), l(n);
    const double bias = rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.bernoulli(bias) ? 1 : 0;
      l[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    const auto r = report(confusion(p, l));
    const auto o = oracle::brute_force_metrics(p, l);
    const bool same = r.accuracy == o.accuracy && r.precision == o.precision &&
                      r.recall == o.recall && r.f1_positive == o.f1;
    mismatches += same ? 0 : 1;
  }
  const double secs = seconds_since(t0);
  v.expect(mismatches == 0, std::to_string(mismatches) + " mismatching trials");
  v.expect(secs < 1.0, "runtime " + fmt(secs, 3) + " s");
  v.note("1000 trials, " + std::to_string(mismatches) + " mismatches, " + fmt(secs, 3) + " s");
}

void confusion_fixture(Verdict& v) {
  const auto r = report(confusion(std::vector<int>{1, 1, 1, 0}, std::vector<int>{1, 0, 1, 1}));
  v.expect(r.precision == 2.0 / 3.0, "precision " + fmt(r.precision, 17));
  v.expect(r.recall == 2.0 / 3.0, "recall " + fmt(r.recall, 17));
  v.expect(r.f1_positive == 2.0 / 3.0, "f1 " + fmt(r.f1_positive, 17));
  v.expect(r.accuracy == 0.5, "accuracy " + fmt(r.accuracy, 17));
  v.note("P=R=F1=" + fmt(r.f1_positive) + ", accuracy=" + fmt(r.accuracy));
}

void bertscore_identities(Verdict& v) {
  auto near = [](double a, double b) { return std::fabs(a - b) <= 1e-9; };
  auto provider = std::make_shared<FixtureEmbeddingProvider>(testsupport::fixture("embeddings.jsonl"));
  for (const char* key : {"strong funding", "large team", "funding"}) {
    const auto e = provider->embed(key);
    const auto r = bertscore(e, e);
    v.expect(near(r.precision, 1) && near(r.recall, 1) && near(r.f1, 1),
             std::string("identity on '") + key + "'");
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  const auto orth = bertscore(I.topRows(2), I.bottomRows(2));
  v.expect(orth.precision == 0 && orth.recall == 0 && orth.f1 == 0, "orthogonal gives 0");

  Eigen::MatrixXd cand(2, 3), ref(2, 3);
  cand << 1, 0, 0, 0, 0.5, std::sqrt(0.75);
  ref << 1, 0, 0, 0, 1, 0;
  const auto hand = bertscore(cand, ref);
  v.expect(near(hand.precision, 0.75) && near(hand.recall, 0.75) && near(hand.f1, 0.75),
           "hand 2x2 " + fmt(hand.precision, 12));

  Rng rng(3);
  double worst = 0.0, worst_oracle = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = static_cast<Eigen::Index>(1 + rng.index(16));
    const auto ra = static_cast<Eigen::Index>(1 + rng.index(12));
    const auto rb = static_cast<Eigen::Index>(1 + rng.index(12));
    Eigen::MatrixXd a(ra, d), b(rb, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
    const auto ab = bertscore(a, b);
    const auto ba = bertscore(b, a);
    worst = std::max({worst, std::fabs(ab.precision - ba.recall), std::fabs(ab.recall - ba.precision)});
    oracle::Mat oa(static_cast<std::size_t>(ra)), ob(static_cast<std::size_t>(rb));
    for (Eigen::Index i = 0; i < ra; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) oa[static_cast<std::size_t>(i)].push_back(a(i, j));
    }
    for (Eigen::Index i = 0; i < rb; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) ob[static_cast<std::size_t>(i)].push_back(b(i, j));
    }
    const auto o = oracle::bertscore(oa, ob);
    worst_oracle = std::max({worst_oracle, std::fabs(ab.precision - o.p), std::fabs(ab.recall - o.r),
                             std::fabs(ab.f1 - o.f)});
  }
  v.expect(worst <= 1e-9, "symmetry gap " + fmt(worst, 15));
  v.expect(worst_oracle <= 1e-9, "oracle gap " + fmt(worst_oracle, 15));
  v.note("hand case " + fmt(hand.f1, 6) + ", symmetry gap over 100 pairs " + fmt(worst, 15));
}

void gbdt_checks(Verdict& v) {
  Eigen::MatrixXd X(4, 1);
  Eigen::VectorXi y(4);
  X << 1, 2, 3, 4;
  y << 1, 1, 0, 0;
  gbdt::GbdtConfig c;
  c.n_rounds = 1;
  c.max_depth = 1;
  c.learning_rate = 1.0;
  c.lambda = 1.0;
  c.min_child_weight = 0.0;
  const auto m = gbdt::fit(X, y, c);
  double leaf = std::nan("");
  if (m.trees.size() == 1 && m.trees[0].nodes.size() == 3) {
    const auto& root = m.trees[0].nodes[0];
    leaf = m.trees[0].nodes[static_cast<std::size_t>(root.left)].weight;
  }
  const double expected = oracle::newton_leaf({1, 1}, 0.0, 1.0);
  v.expect(std::fabs(expected - 2.0 / 3.0) <= 1e-12, "oracle leaf");
  v.expect(std::fabs(leaf - expected) <= 1e-9, "leaf " + fmt(leaf, 12));

  Rng rng(4);
  std::size_t violations = 0;
  double worst_rise = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<Eigen::Index>(30 + rng.index(150));
    const auto d = static_cast<Eigen::Index>(1 + rng.index(6));
    Eigen::MatrixXd F(n, d);
    Eigen::VectorXi t(n);
    Eigen::VectorXd w(d);
    for (Eigen::Index j = 0; j < d; ++j) w(j) = rng.normal();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) F(i, j) = rng.normal();
      t(i) = F.row(i).dot(w) + rng.normal(0, 1) > 0 ? 1 : 0;
    }
    t(0) = 1;
    t(1) = 0;
    gbdt::GbdtConfig fc;
    fc.n_rounds = 20;
    fc.max_depth = 1 + static_cast<int>(rng.index(4));
    fc.learning_rate = rng.uniform(0.01, 0.3);
    fc.lambda = rng.uniform(0.0, 2.0);
    fc.gamma = 0.0;
    fc.min_child_weight = rng.uniform(0.0, 2.0);
    const auto fm = gbdt::fit(F, t, fc);
    double prev = gbdt::log_loss(fm, F, t, 0);
    for (std::size_t r = 1; r <= fm.trees.size(); ++r) {
      const double cur = gbdt::log_loss(fm, F, t, r);
      if (cur > prev + 1e-6) ++violations;
      worst_rise = std::max(worst_rise, cur - prev);
      prev = cur;
    }
  }
  v.expect(violations == 0, std::to_string(violations) + " log-loss increases");
  v.note("leaf " + fmt(leaf, 10) + "; 50 datasets, max per-round increase " + fmt(worst_rise, 9));
}

struct PipelineResult {
  double accuracy = 0.0;
  double seconds = 0.0;
  std::size_t test_size = 0;
};

PipelineResult run_learnability(const SynthConfig& config, const std::string& tag) {
  testsupport::TempDir dir("accept_" + tag);
  const pl::Layout L{dir.path()};
  const auto t0 = Clock::now();
  pl::run_synth({config, L.raw(), 0});
  pl::run_ingest({L.raw(), L.tables(), L.integrity(), L.row_errors(), std::nullopt, false});
  pl::run_features({L.tables(), L.profiles(), L.profiles_csv(), config.reference_date, std::nullopt});
  pl::SplitOptions so;
  so.profiles_path = L.profiles();
  so.out_dir = L.splits();
  so.spec = SplitSpec{0.8, 0.1, 0.1, derive_seed(config.seed, "split"), true};
  pl::run_split(so);
  pl::TrainOptions to;
  to.train_path = L.splits() / "train.jsonl";
  to.test_path = L.splits() / "test.jsonl";
  to.model_path = L.model();
  to.report_path = L.baseline_report();
  const auto counts = pl::run_train_baseline(to);
  return {counts["test_accuracy"].get<double>(), seconds_since(t0),
          counts["test_size"].get<std::size_t>()};
}

void learnability(Verdict& v) {
  const auto data = testsupport::source_dir() / "data" / "synth";
  const auto thr_cfg = SynthConfig::load(data / "threshold.conf");
  v.expect(thr_cfg.mode == NoiseMode::kDeterministicThreshold && thr_cfg.n_companies == 2000,
           "threshold config shape");
  const auto thr = run_learnability(thr_cfg, "thr");
  v.expect(thr.accuracy >= 0.95, "threshold accuracy " + fmt(thr.accuracy));
  v.expect(thr.seconds < 30.0, "threshold runtime " + fmt(thr.seconds, 2) + " s");
  v.note("threshold: accuracy " + fmt(thr.accuracy) + " on " + std::to_string(thr.test_size) +
         " held-out in " + fmt(thr.seconds, 2) + " s");

  const auto log_cfg = SynthConfig::load(data / "logistic.conf");
  const auto bayes = estimate_bayes_accuracy(log_cfg, 200000);
  // Value from the independent recomputation in tests/oracles/bayes_mc.py.
  v.expect(std::fabs(bayes.accuracy - 0.72805) <= 0.005, "Bayes estimate " + fmt(bayes.accuracy));
  const auto logi = run_learnability(log_cfg, "log");
  const double lo = bayes.accuracy - 0.05, hi = bayes.accuracy + 0.01;
  v.expect(logi.accuracy >= lo && logi.accuracy <= hi,
           "logistic accuracy " + fmt(logi.accuracy) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
  v.note("logistic: B=" + fmt(bayes.accuracy) + ", accuracy " + fmt(logi.accuracy) + " on " +
         std::to_string(logi.test_size) + " held-out");
}

void imputation(Verdict& v) {
  SynthConfig c;
  c.n_companies = 500;
  c.seed = 606;
  const Tables base = synthesize(c).tables;
  const CompanyStore base_store(base);
  std::map<std::string, int> base_labels;
  for (const auto& p : derive_profiles(base_store)) base_labels[p.org_id] = p.success;

  Rng rng(17);
  std::size_t checked = 0, both_dates_missing = 0, all_amounts_missing = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Tables t = base;
    const double rate = rng.uniform(0.05, 0.95);
    for (auto& o : t.organizations) {
      if (rng.bernoulli(rate)) o.founded_on.reset();
      if (rng.bernoulli(rate)) o.created_at.reset();
      if (rng.bernoulli(rate)) o.description.clear();
    }
    for (auto& r : t.funding_rounds) {
      if (rng.bernoulli(rate)) r.raised_usd.reset();
      if (rng.bernoulli(rate)) r.announced_on.reset();
    }
    for (auto& r : t.ipos) {
      if (rng.bernoulli(rate)) r.went_public_on.reset();
    }
    for (auto& r : t.acquisitions) {
      if (rng.bernoulli(rate)) r.announced_on.reset();
    }
    for (auto& j : t.jobs) {
      if (rng.bernoulli(rate)) j.title.clear();
    }
    const CompanyStore store(t);
    for (const auto& org : t.organizations) {
      const auto p = derive_profile(org, store);
      ++checked;
      const auto f = feature_vector(p);
      for (int k = 0; k < 6; ++k) v.expect(std::isfinite(f(k)), "non-finite feature for " + p.org_id);
      v.expect(!p.org_id.empty() && !p.name.empty(), "empty key field");
      if (!org.founded_on && !org.created_at) {
        ++both_dates_missing;
        v.expect(p.age_years == -1.0, "age without dates is " + fmt(p.age_years));
      } else {
        v.expect(p.age_years >= 0.0 || p.age_anomaly, "age with a date is " + fmt(p.age_years));
      }
      bool any_amount = false;
      for (auto i : store.rounds_by_org(org.org_id)) any_amount |= t.funding_rounds[i].raised_usd.has_value();
      if (!any_amount) {
        ++all_amounts_missing;
        v.expect(p.total_raised_usd == 0.0, "absent amounts give " + fmt(p.total_raised_usd));
      }
      if (store.rounds_by_org(org.org_id).empty()) {
        v.expect(p.num_funding_rounds == 0 && p.num_investors == 0, "absent rounds give non-zero counts");
      }
      v.expect(p.success == base_labels.at(org.org_id), "label changed for " + p.org_id);
    }
  }
  v.note(std::to_string(checked) + " profiles over 40 deletion patterns; " +
         std::to_string(both_dates_missing) + " without dates, " + std::to_string(all_amounts_missing) +
         " without amounts");
}

bool balanced_markers(const std::string& s) {
  const std::string open(kChatStart), close(kChatEnd);
  int depth = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, open.size(), open) == 0) {
      if (++depth > 1) return false;
      i += open.size();
    } else if (s.compare(i, close.size(), close) == 0) {
      if (--depth < 0) return false;
      i += close.size();
    } else {
      ++i;
    }
  }
  return depth == 0;
}

void prompt_goldens(Verdict& v) {
  const auto p = testsupport::fixture_profile();
  const std::array<PromptVariant, 4> variants = {PromptVariant::kV1, PromptVariant::kV2,
                                                 PromptVariant::kV3, PromptVariant::kV4};
  for (auto var : variants) {
    const auto rec = enforce_budget(render_prompt(p, var, PromptMode::kSft), kDefaultTokenBudget,
                                    default_token_count);
    const auto name = "prompt_" + text::to_lower_ascii(variant_name(var)) + ".txt";
    const auto path = testsupport::golden(name);
    v.expect(std::filesystem::exists(path), "missing golden " + name);
    v.expect(testsupport::slurp(path) == serialize_chat(rec.chat), name + " differs");
  }
  v.expect(testsupport::slurp(testsupport::golden("profile_block.txt")) == render_profile_block(p),
           "profile_block.txt differs");

  SynthConfig c;
  c.n_companies = 400;
  c.seed = 707;
  c.leak_rate = 1.0;
  const auto profiles = derive_profiles(CompanyStore(synthesize(c).tables));
  std::size_t records = 0, leaky_sources = 0, max_tokens = 0;
  for (const auto& prof : profiles) {
    leaky_sources += text::contains_ci(prof.description, "ipo") ||
                     text::contains_ci(prof.description, "acqui");
  }
  for (const auto& prof : profiles) {
    for (auto var : variants) {
      for (auto mode : {PromptMode::kSft, PromptMode::kInference}) {
        const auto rec = enforce_budget(render_prompt(prof, var, mode), kDefaultTokenBudget,
                                        default_token_count);
        const auto s = serialize_chat(rec.chat);
        ++records;
        const auto tokens = default_token_count(s);
        max_tokens = std::max(max_tokens, tokens);
        v.expect(balanced_markers(s), "unbalanced markers for " + prof.org_id);
        v.expect(tokens <= kDefaultTokenBudget, "record over budget: " + std::to_string(tokens));
        for (const char* term : {"ipo", "acquired", "acquisition"}) {
          v.expect(!text::contains_ci(s, term), std::string("leak '") + term + "' in " + prof.org_id);
        }
      }
    }
  }
  v.expect(leaky_sources > 0, "corpus exercised no leakage");
  v.note("4 goldens match; " + std::to_string(records) + " records, max " + std::to_string(max_tokens) +
         " tokens, " + std::to_string(leaky_sources) + " leaky descriptions guarded");
}

void fewshot(Verdict& v) {
  std::vector<SftRecord> corpus;
  Rng rng(8);
  for (std::size_t i = 0; i < 12000; ++i) {
    SftRecord r;
    r.chat.metadata.org_id = "org-" + std::to_string(i);
    r.target_label = rng.bernoulli(0.4) ? 1 : 0;
    corpus.push_back(std::move(r));
  }
  for (std::size_t k : {1000u, 2000u, 4000u}) {
    const auto a = sample_fewshot(corpus, k, 99);
    const auto b = sample_fewshot(corpus, k, 99);
    std::size_t pos = 0;
    std::set<std::string> ids;
    for (const auto& r : a) {
      pos += static_cast<std::size_t>(r.target_label);
      ids.insert(r.chat.metadata.org_id);
    }
    const std::size_t neg = a.size() - pos;
    v.expect(a.size() == k, "k=" + std::to_string(k) + " returned " + std::to_string(a.size()));
    v.expect((pos > neg ? pos - neg : neg - pos) <= 1, "k=" + std::to_string(k) + " class gap");
    v.expect(ids.size() == a.size(), "duplicate records at k=" + std::to_string(k));
    v.expect(a == b, "non-deterministic at k=" + std::to_string(k));
    v.note("k=" + std::to_string(k) + ": " + std::to_string(pos) + "/" + std::to_string(neg));
  }
}

std::vector<SftRecord> synthetic_records(const std::vector<CompanyProfile>& profiles) {
  std::vector<SftRecord> out;
  for (const auto& p : profiles) {
    out.push_back(enforce_budget(render_prompt(p, PromptVariant::kV4, PromptMode::kInference),
                                 kDefaultTokenBudget, default_token_count));
  }
  return out;
}

EndpointConfig mock_config(const MockEndpoint& mock, int max_in_flight) {
  EndpointConfig c;
  c.base_url = mock.base_url();
  c.model = "mock";
  c.api_key_env.clear();
  c.max_in_flight = max_in_flight;
  c.timeout_seconds = 10;
  return c;
}

void harness_vs_mocks(Verdict& v) {
  const auto t0 = Clock::now();
  const Sleeper no_sleep = [](std::chrono::milliseconds) {};

  SynthConfig c;
  c.n_companies = 500;
  c.seed = 909;
  const auto profiles = derive_profiles(CompanyStore(synthesize(c).tables));
  const auto records = synthetic_records(profiles);
  {
    MockOptions mo;
    mo.mode = MockOptions::Mode::kOracle;
    for (const auto& p : profiles) mo.labels[p.name] = p.success;
    MockEndpoint mock(mo);
    mock.start();
    const auto run = run_eval(ChatClient(mock_config(mock, 8)), records, EvalOptions{8, {}, nullptr});
    mock.stop();
    v.expect(run.report.accuracy == 1.0, "oracle accuracy " + fmt(run.report.accuracy));
    v.expect(run.outcomes.size() == 500, "oracle records");
    v.note("oracle: accuracy " + fmt(run.report.accuracy) + " on " + std::to_string(run.outcomes.size()));
  }
  {
    SynthConfig bc;
    bc.n_companies = 2000;
    bc.seed = 910;
    const auto all = derive_profiles(CompanyStore(synthesize(bc).tables));
    std::vector<CompanyProfile> balanced;
    std::size_t pos = 0, neg = 0;
    for (const auto& p : all) {
      if (p.success && pos < 200) balanced.push_back(p), ++pos;
      if (!p.success && neg < 200) balanced.push_back(p), ++neg;
    }
    v.expect(balanced.size() == 400, "balanced set has " + std::to_string(balanced.size()));
    MockOptions mo;
    mo.constant_label = 1;
    MockEndpoint mock(mo);
    mock.start();
    const auto run = run_eval(ChatClient(mock_config(mock, 8)), synthetic_records(balanced),
                              EvalOptions{8, {}, nullptr});
    mock.stop();
    v.expect(std::fabs(run.report.accuracy - 0.5) <= 0.05, "constant accuracy " + fmt(run.report.accuracy));
    v.note("constant: accuracy " + fmt(run.report.accuracy) + " on " + std::to_string(run.outcomes.size()));
  }
  {
    MockOptions mo;
    mo.scripted_statuses = {503, 503, 200};
    MockEndpoint mock(mo);
    mock.start();
    const ChatClient client(mock_config(mock, 1), nullptr, std::nullopt, no_sleep);
    const std::vector<SftRecord> one(records.begin(), records.begin() + 1);
    const auto run = run_eval(client, one, EvalOptions{1, {}, nullptr});
    mock.stop();
    const auto& o = run.outcomes.at(0);
    v.expect(o.error.empty(), "flaky request failed: " + o.error);
    v.expect(o.attempts == 3, "flaky attempts " + std::to_string(o.attempts));
    v.expect(o.response.status == ParseStatus::kParsed, "flaky response unparsed");
    v.note("flaky: " + std::to_string(o.attempts) + " attempts");
  }
  {
    MockOptions mo;
    mo.min_latency_ms = 2;
    mo.max_latency_ms = 15;
    MockEndpoint mock(mo);
    mock.start();
    const int limit = 4;
    const std::vector<SftRecord> some(records.begin(), records.begin() + 120);
    const auto run = run_eval(ChatClient(mock_config(mock, limit)), some, EvalOptions{limit, {}, nullptr});
    mock.stop();
    v.expect(mock.max_observed_in_flight() <= limit,
             "observed " + std::to_string(mock.max_observed_in_flight()) + " in flight");
    v.expect(run.transport_failures == 0, "probe transport failures");
    v.note("concurrency: max observed " + std::to_string(mock.max_observed_in_flight()) + " of " +
           std::to_string(limit));
  }
  const double secs = seconds_since(t0);
  v.expect(secs < 60.0, "runtime " + fmt(secs, 2) + " s");
  v.note(fmt(secs, 2) + " s");
}

void manifest_constants(Verdict& v) {
  const auto m = nlohmann::json::parse(emit_training_manifest());
  v.expect(m.at("epochs") == 5, "epochs");
  v.expect(m.at("learning_rate").get<double>() == 5e-4, "learning_rate");
  v.expect(m.at("warmup_steps") == 20, "warmup_steps");
  v.expect(m.at("weight_decay").get<double>() == 0.01, "weight_decay");
  v.expect(m.at("gradient_accumulation_steps") == 2, "gradient_accumulation_steps");
  v.expect(m.at("max_length") == 256, "max_length");
  v.expect(m.at("lora").at("rank") == 16, "lora.rank");
  v.expect(m.at("lora").at("alpha") == 16, "lora.alpha");
  v.expect(m.at("lora").at("dropout").get<double>() == 0.1, "lora.dropout");
  v.expect(m.at("lora_rank_sweep") == nlohmann::json::array({8, 16, 32, 64, 128}), "lora_rank_sweep");
  v.note("epochs 5, lr 5e-4, warmup 20, wd 0.01, grad-accum 2, max length 256, LoRA 16/16/0.1, sweep {8..128}");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Verdict&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"metric oracle equivalence", metric_oracle},
      {"confusion fixture", confusion_fixture},
      {"BERTScore identities", bertscore_identities},
      {"GBDT hand check and log-loss monotonicity", gbdt_checks},
      {"end-to-end learnability", learnability},
      {"imputation conformance", imputation},
      {"prompt goldens, markers, budget, leakage", prompt_goldens},
      {"few-shot sampler", fewshot},
      {"evaluation harness vs mocks", harness_vs_mocks},
      {"training manifest constants", manifest_constants},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].run(v);
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    failed += v.passed() ? 0 : 1;
    std::cout << "C" << (i + 1) << " " << (v.passed() ? "PASS" : "FAIL") << " " << criteria[i].name
              << ": " << v.detail() << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
