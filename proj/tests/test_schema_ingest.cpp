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
#include <set>
#include <sstream>

#include "exitbench/csv.hpp"
#include "exitbench/error.hpp"
#include "exitbench/rng.hpp"
#include "exitbench/schema_ingest.hpp"
#include "exitbench/synth_corpus.hpp"
#include "support.hpp"

using namespace exitbench;
using testsupport::TempDir;

namespace {

const ColumnMapping kIdentity = ColumnMapping::identity();

}  // namespace

TEST_CASE("header-only organizations file loads empty") {
  TempDir dir("ingest");
  testsupport::spit(dir / "organizations.csv", "org_id,name,description,founded_on,created_at\n");
  const auto r = load_organizations(dir / "organizations.csv", kIdentity);
  CHECK(r.rows.empty());
  CHECK(r.errors.empty());
}

TEST_CASE("malformed date becomes a row error on its line") {
  TempDir dir("ingest");
  testsupport::spit(dir / "organizations.csv",
                    "org_id,name,description,founded_on,created_at\n"
                    "c1,Acme,\"AI tools\",2020-06-11,2020-06-11\n"
                    "c2,Beta,,2019-01-01,\n"
                    "c3,Gamma,,2019-13-45,\n");
  const auto r = load_organizations(dir / "organizations.csv", kIdentity);
  REQUIRE(r.rows.size() == 2);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].line == 4);  // physical line of the third data row
  CHECK(r.rows[0].org_id == "c1");
  CHECK(r.rows[0].name == "Acme");
  CHECK(r.rows[0].description == "AI tools");
  CHECK(r.rows[0].founded_on == Date::from_ymd(2020, 6, 11));
  CHECK_FALSE(r.rows[1].created_at.has_value());

  CHECK_THROWS_AS(load_organizations(dir / "organizations.csv", kIdentity, {.strict = true}),
                  DataError);
}

TEST_CASE("missing file and missing mapped column are fatal") {
  TempDir dir("ingest");
  CHECK_THROWS_AS(load_jobs(dir / "jobs.csv", kIdentity), IoError);
  testsupport::spit(dir / "jobs.csv", "org_id,person_id\n");
  CHECK_THROWS_AS(load_jobs(dir / "jobs.csv", kIdentity), DataError);
}

TEST_CASE("row-level checks: negative amount, duplicates, self-acquisition, field count") {
  TempDir dir("ingest");
  testsupport::spit(dir / "funding_rounds.csv",
                    "round_id,org_id,announced_on,raised_usd\n"
                    "r1,c1,2020-01-01,100\n"
                    "r2,c1,,-5\n"
                    "r1,c1,,1\n"
                    "r3,c1,,abc\n"
                    "r4,c1,\n");
  const auto rounds = load_funding_rounds(dir / "funding_rounds.csv", kIdentity);
  CHECK(rounds.rows.size() == 1);
  CHECK(rounds.errors.size() == 4);

  testsupport::spit(dir / "acquisitions.csv",
                    "acquiree_id,acquirer_id,announced_on\nc1,c1,\nc1,c2,2021-05-05T00:00:00\n");
  const auto acq = load_acquisitions(dir / "acquisitions.csv", kIdentity);
  REQUIRE(acq.rows.size() == 1);
  CHECK(acq.errors.size() == 1);
  CHECK(acq.rows[0].announced_on == Date::from_ymd(2021, 5, 5));
}

TEST_CASE("crunchbase mapping file matches the built-in defaults") {
  const auto from_file = ColumnMapping::load(testsupport::source_dir() / "data" / "crunchbase_mapping.txt");
  const auto defaults = ColumnMapping::crunchbase_defaults();
  for (auto kind : kAllTableKinds) {
    for (auto logical : logical_columns(kind)) {
      CHECK(from_file.physical(kind, logical) == defaults.physical(kind, logical));
    }
  }
  CHECK(defaults.physical(TableKind::kFundingRounds, "raised_usd") == "raised_amount_usd");
  CHECK(defaults.physical(TableKind::kOrganizations, "name") == "name");
  CHECK_THROWS_AS(ColumnMapping::parse("organizations.nope = x\n"), UsageError);
  CHECK_THROWS_AS(ColumnMapping::parse("no equals sign\n"), UsageError);
  const auto custom = ColumnMapping::parse("# comment\nipos.org_id = company\n");
  CHECK(custom.physical(TableKind::kIpos, "org_id") == "company");
}

TEST_CASE("store indexes and integrity summary") {
  SUBCASE("empty store") {
    const auto store = build_store({});
    CHECK(store.organization("x") == nullptr);
    CHECK(store.rounds_by_org("x").empty());
    CHECK(store.jobs_by_org("x").empty());
    CHECK(store.integrity().total() == 0);
  }
  SUBCASE("rounds by org and a dangling round") {
    Tables t;
    t.organizations.push_back({"c1", "Acme", "", std::nullopt, std::nullopt});
    t.funding_rounds.push_back({"r1", "c1", std::nullopt, 10.0});
    t.funding_rounds.push_back({"r2", "c1", std::nullopt, 20.0});
    t.funding_rounds.push_back({"r3", "ghost", std::nullopt, 5.0});
    const auto store = build_store(t);
    const auto idx = store.rounds_by_org("c1");
    REQUIRE(idx.size() == 2);
    CHECK(store.tables().funding_rounds[idx[0]].round_id == "r1");
    CHECK(store.tables().funding_rounds[idx[1]].round_id == "r2");
    CHECK(store.tables().funding_rounds.size() == 3);  // retained
    CHECK(store.integrity().total() == 1);
  }
}

TEST_CASE("property: identity write/read round-trip and row conservation") {
  SynthConfig c;
  c.n_companies = 120;
  c.seed = 99;
  c.missing = {0.2, 0.2, 0.2, 0.2, 0.2, 0.2};
  const auto corpus = synthesize(c);
  TempDir dir("roundtrip");
  write_tables(dir.path(), corpus.tables, kIdentity);
  const auto loaded = load_tables(dir.path(), kIdentity);
  CHECK(loaded.error_count() == 0);
  CHECK(loaded.tables.organizations == corpus.tables.organizations);
  CHECK(loaded.tables.funding_rounds == corpus.tables.funding_rounds);
  CHECK(loaded.tables.investments == corpus.tables.investments);
  CHECK(loaded.tables.ipos == corpus.tables.ipos);
  CHECK(loaded.tables.acquisitions == corpus.tables.acquisitions);
  CHECK(loaded.tables.jobs == corpus.tables.jobs);

  // Corrupt random lines; rows + errors must still equal data lines.
  Rng rng(4);
  for (auto kind : kAllTableKinds) {
    const auto path = dir.path() / (std::string(table_name(kind)) + ".csv");
    const auto recs = csv::read_file(path);
    std::ostringstream out;
    std::size_t data_lines = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      auto fields = recs[i].fields;
      if (i > 0) {
        ++data_lines;
        if (rng.bernoulli(0.2)) fields.pop_back();
      }
      csv::write_row(out, fields);
    }
    testsupport::spit(path, out.str());
    std::size_t rows = 0, errors = 0;
    switch (kind) {
      case TableKind::kOrganizations: {
        auto r = load_organizations(path, kIdentity);
        rows = r.rows.size(), errors = r.errors.size();
        break;
      }
      case TableKind::kFundingRounds: {
        auto r = load_funding_rounds(path, kIdentity);
        rows = r.rows.size(), errors = r.errors.size();
        break;
      }
      case TableKind::kInvestments: {
        auto r = load_investments(path, kIdentity);
        rows = r.rows.size(), errors = r.errors.size();
        break;
      }
      case TableKind::kIpos: {
        auto r = load_ipos(path, kIdentity);
        rows = r.rows.size(), errors = r.errors.size();
        break;
      }
      case TableKind::kAcquisitions: {
        auto r = load_acquisitions(path, kIdentity);
        rows = r.rows.size(), errors = r.errors.size();
        break;
      }
      case TableKind::kJobs: {
        auto r = load_jobs(path, kIdentity);
        rows = r.rows.size(), errors = r.errors.size();
        break;
      }
    }
    CHECK(rows + errors == data_lines);
  }
}

TEST_CASE("property: union of rounds-by-org lists is the round table") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig c;
    c.n_companies = 80;
    c.seed = seed;
    const auto store = build_store(synthesize(c).tables);
    std::multiset<std::size_t> seen;
    for (const auto& org : store.tables().organizations) {
      for (auto i : store.rounds_by_org(org.org_id)) seen.insert(i);
    }
    CHECK(seen.size() == store.tables().funding_rounds.size());
    CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == seen.size());
  }
}
