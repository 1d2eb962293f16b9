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

#include <algorithm>
#include <cmath>
#include <set>

#include "exitbench/error.hpp"
#include "exitbench/feature_engine.hpp"
#include "exitbench/synth_corpus.hpp"
#include "exitbench/token_counter.hpp"
#include "support.hpp"

using namespace exitbench;

namespace {

const Date kRef = Date::from_ymd(2025, 6, 11);

OrganizationRow org(const std::string& id) { return {id, "Org " + id, "", std::nullopt, std::nullopt}; }

std::vector<CompanyProfile> labeled(std::size_t pos, std::size_t neg) {
  std::vector<CompanyProfile> out;
  for (std::size_t i = 0; i < pos + neg; ++i) {
    CompanyProfile p;
    p.org_id = "o" + std::to_string(i);
    p.success = i < pos ? 1 : 0;
    out.push_back(p);
  }
  return out;
}

std::size_t positives(const std::vector<CompanyProfile>& v) {
  return static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [](const auto& p) { return p.success == 1; }));
}

}  // namespace

TEST_CASE("compute_age") {
  CHECK(compute_age(Date::from_ymd(2020, 6, 11), kRef) == doctest::Approx(5.0).epsilon(0.002));
  CHECK(compute_age(Date::from_ymd(2020, 6, 11), kRef) == 1826.0 / 365.25);
  CHECK(compute_age(std::nullopt, kRef) == -1.0);
  CHECK(compute_age(kRef, kRef) == 0.0);
  CHECK_THROWS_AS(compute_age(Date::from_ymd(2026, 1, 1), kRef), DataError);
}

TEST_CASE("derive_profile on hand fixtures") {
  Tables t;
  t.organizations = {org("bare"), org("funded"), org("buyer")};
  t.funding_rounds = {{"r1", "funded", std::nullopt, 1'000'000.0},
                      {"r2", "funded", std::nullopt, 2'500'000.0}};
  t.investments = {{"r1", "inv-a"}, {"r2", "inv-a"}, {"r2", "inv-b"}};
  t.acquisitions = {{"x1", "buyer", std::nullopt}, {"x2", "buyer", std::nullopt}};
  t.organizations.push_back(org("x1"));
  t.organizations.push_back(org("x2"));
  t.jobs = {{"funded", "p1", "Chief Executive Officer"},
            {"funded", "p2", "Software Engineer"},
            {"funded", "p3", "VP of Sales"},
            {"funded", "p4", "Co-Founder"},
            {"funded", "p5", "Vice President, Growth"},
            {"funded", "p6", "Executive Assistant"}};
  const auto store = build_store(t);

  const auto bare = derive_profile(*store.organization("bare"), store);
  CHECK(bare.age_years == -1.0);
  CHECK(bare.total_raised_usd == 0.0);
  CHECK(bare.num_funding_rounds == 0);
  CHECK(bare.num_investors == 0);
  CHECK(bare.num_acquisitions_made == 0);
  CHECK(bare.num_executives == 0);
  CHECK(bare.success == 0);

  const auto funded = derive_profile(*store.organization("funded"), store);
  CHECK(funded.total_raised_usd == 3'500'000.0);
  CHECK(funded.num_funding_rounds == 2);
  CHECK(funded.num_investors == 2);
  CHECK(funded.num_executives == 4);

  const auto buyer = derive_profile(*store.organization("buyer"), store);
  CHECK(buyer.num_acquisitions_made == 2);
  CHECK(buyer.success == 0);
  CHECK(derive_label("buyer", store) == 0);
  CHECK(derive_label("x1", store) == 1);
  CHECK(derive_profile(*store.organization("x1"), store).was_acquired == 1);
}

TEST_CASE("derive_label reads IPO rows and acquiree role") {
  Tables t;
  t.organizations = {org("a"), org("b")};
  t.ipos = {{"a", std::nullopt}};
  const auto store = build_store(t);
  CHECK(derive_label("a", store) == 1);
  CHECK(derive_label("b", store) == 0);
}

TEST_CASE("age falls back to created_at and flags future founding dates") {
  Tables t;
  auto a = org("a");
  a.created_at = Date::from_ymd(2024, 6, 11);
  auto b = org("b");
  b.founded_on = Date::from_ymd(2030, 1, 1);
  t.organizations = {a, b};
  const auto store = build_store(t);
  const auto pa = derive_profile(*store.organization("a"), store);
  CHECK(pa.age_source == AgeSource::kCreatedAt);
  CHECK(pa.age_years == doctest::Approx(1.0).epsilon(0.003));
  const auto pb = derive_profile(*store.organization("b"), store);
  CHECK(pb.age_anomaly);
  CHECK(pb.age_years == -1.0);
}

TEST_CASE("executive title rules match whole words case-insensitively") {
  const auto rules = ExecutiveTitles::defaults();
  CHECK(rules.matches("CEO"));
  CHECK(rules.matches("chief technology officer"));
  CHECK(rules.matches("Senior VP, Marketing"));
  CHECK_FALSE(rules.matches("Vice Chair"));
  CHECK_FALSE(rules.matches("Chiefly Engineer"));
  CHECK_FALSE(rules.matches(""));
  const auto from_file = ExecutiveTitles::load(testsupport::source_dir() / "data" / "executive_titles.txt");
  CHECK(from_file.rules() == rules.rules());
}

TEST_CASE("corpus stats") {
  SUBCASE("empty corpus") {
    const auto s = corpus_stats({}, default_token_count);
    CHECK(s.size == 0);
    CHECK(s.positive_ratio == 0.0);
    for (auto c : s.length_histogram) CHECK(c == 0);
  }
  SUBCASE("two description lengths land in distinct buckets") {
    auto v = labeled(1, 1);
    v[0].description = "one two three";
    for (int i = 0; i < 300; ++i) v[1].description += "w ";
    const auto s = corpus_stats(v, default_token_count);
    std::size_t nonzero = 0, total = 0;
    for (auto c : s.length_histogram) {
      nonzero += c > 0;
      total += c;
    }
    CHECK(nonzero == 2);
    CHECK(total == 2);
  }
  SUBCASE("class ratio") {
    const auto s = corpus_stats(labeled(300, 700), default_token_count);
    CHECK(s.positive_ratio == doctest::Approx(0.3));
    CHECK(s.positives == 300);
    CHECK(s.to_json()["negatives"] == 700);
  }
}

TEST_CASE("balance_dataset") {
  const auto v = labeled(300, 700);
  const auto b = balance_dataset(v, 5);
  CHECK(b.size() == 600);
  CHECK(positives(b) == 300);
  CHECK(balance_dataset(v, 5) == b);
  CHECK_FALSE(balance_dataset(v, 6) == b);
  const auto even = labeled(50, 50);
  CHECK(balance_dataset(even, 1) == even);
  CHECK_THROWS_AS(balance_dataset(labeled(0, 10), 1), DataError);
}

TEST_CASE("split sizes and stratification") {
  CHECK(split_sizes(10, {}) == std::array<std::size_t, 3>{8, 1, 1});
  CHECK(split_sizes(2000, {}) == std::array<std::size_t, 3>{1600, 200, 200});
  CHECK(split_sizes(7, {}) == std::array<std::size_t, 3>{5, 1, 1});

  SplitSpec spec;
  spec.seed = 3;
  const auto s = split(labeled(50, 50), spec);
  CHECK(s.train.size() == 80);
  CHECK(positives(s.train) == 40);
  CHECK(positives(s.val) == 5);
  CHECK_THROWS_AS(split(labeled(1, 1), spec), DataError);
  SplitSpec bad;
  bad.train = 0.7;
  CHECK_THROWS_AS(split(labeled(5, 5), bad), UsageError);
}

TEST_CASE("property: splits partition the input for random corpora") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto pos = 2 + rng.index(150);
    const auto neg = 2 + rng.index(150);
    const auto v = labeled(pos, neg);
    SplitSpec spec;
    spec.seed = rng.next_u64();
    spec.stratified = rng.bernoulli(0.7);
    const auto s = split(v, spec);
    std::multiset<std::string> ids;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
      for (const auto& p : *part) ids.insert(p.org_id);
    }
    CHECK(ids.size() == v.size());
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == v.size());
    if (spec.stratified) {
      for (const auto* part : {&s.train, &s.val, &s.test}) {
        const double expected = static_cast<double>(part->size()) * static_cast<double>(pos) /
                                static_cast<double>(v.size());
        CHECK(std::fabs(static_cast<double>(positives(*part)) - expected) <= 1.0 + 1e-9);
      }
    }
    CHECK(split(v, spec).test == s.test);
  }
}

TEST_CASE("property: totality and success = had_ipo or was_acquired over fuzzed stores") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    SynthConfig c;
    c.n_companies = 150;
    c.seed = seed;
    c.missing = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    const auto store = build_store(synthesize(c).tables);
    for (const auto& p : derive_profiles(store)) {
      for (int f = 0; f < 6; ++f) CHECK(std::isfinite(feature_vector(p)(f)));
      CHECK(p.success == (p.had_ipo | p.was_acquired));
      CHECK((p.age_years >= 0.0 || p.age_years == -1.0));
    }
  }
}

TEST_CASE("property: adding a funding round never decreases totals") {
  Rng rng(8);
  SynthConfig c;
  c.n_companies = 60;
  const auto base = synthesize(c).tables;
  for (int trial = 0; trial < 30; ++trial) {
    const auto& victim = base.organizations[rng.index(base.organizations.size())];
    auto grown = base;
    grown.funding_rounds.push_back({"extra-" + std::to_string(trial), victim.org_id, std::nullopt,
                                    rng.bernoulli(0.5) ? std::optional<double>(rng.uniform(0, 1e6))
                                                       : std::nullopt});
    const auto s0 = build_store(base);
    const auto s1 = build_store(grown);
    const auto p0 = derive_profile(*s0.organization(victim.org_id), s0);
    const auto p1 = derive_profile(*s1.organization(victim.org_id), s1);
    CHECK(p1.total_raised_usd >= p0.total_raised_usd);
    CHECK(p1.num_funding_rounds == p0.num_funding_rounds + 1);
  }
}

TEST_CASE("profile JSONL round-trip") {
  testsupport::TempDir dir("profiles");
  SynthConfig c;
  c.n_companies = 40;
  const auto store = build_store(synthesize(c).tables);
  const auto profiles = derive_profiles(store);
  write_profiles_jsonl(dir / "p.jsonl", profiles);
  CHECK(read_profiles_jsonl(dir / "p.jsonl") == profiles);
  write_profiles_csv(dir / "p.csv", profiles);
  CHECK(testsupport::slurp(dir / "p.csv").rfind("org_id,", 0) == 0);
}
