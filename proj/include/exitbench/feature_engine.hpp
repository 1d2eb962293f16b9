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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "exitbench/date.hpp"
#include "exitbench/schema_ingest.hpp"

namespace exitbench {

// Snapshot date of the source data; ages are measured against it.
inline const Date kDefaultReferenceDate = Date::from_ymd(2025, 6, 11);

inline constexpr double kDaysPerYear = 365.25;
inline constexpr double kAgeUnknown = -1.0;

enum class AgeSource { kFoundedOn, kCreatedAt, kMissing };

struct CompanyProfile {
  std::string org_id;
  std::string name;
  std::string description;
  double age_years = kAgeUnknown;
  double total_raised_usd = 0.0;
  std::int64_t num_funding_rounds = 0;
  std::int64_t num_investors = 0;
  std::int64_t num_acquisitions_made = 0;
  std::int64_t num_executives = 0;
  int had_ipo = 0;
  int was_acquired = 0;
  int success = 0;

  // Provenance: which inputs were absent before imputation.
  AgeSource age_source = AgeSource::kMissing;
  bool age_anomaly = false;  // founding date after the reference date
  bool raised_missing = false;
  bool rounds_missing = false;
  bool investors_missing = false;
  bool acquisitions_missing = false;
  bool executives_missing = false;

  friend bool operator==(const CompanyProfile&, const CompanyProfile&) = default;
};

// Model-facing numeric features, in this column order. Event flags are
// excluded so the label never leaks into inputs.
inline constexpr std::array<std::string_view, 6> kFeatureNames = {
    "age_years",       "total_raised_usd",      "num_funding_rounds",
    "num_investors",   "num_acquisitions_made", "num_executives"};

Eigen::Matrix<double, 6, 1> feature_vector(const CompanyProfile& p);
Eigen::MatrixXd feature_matrix(const std::vector<CompanyProfile>& profiles);
Eigen::VectorXi label_vector(const std::vector<CompanyProfile>& profiles);

// Case-insensitive whole-word title matcher for executive roles.
class ExecutiveTitles {
 public:
  // chief, ceo, cfo, cto, coo, founder, president, vp, vice president
  static ExecutiveTitles defaults();
  // One rule per line; `#` comments.
  static ExecutiveTitles load(const std::filesystem::path& path);
  explicit ExecutiveTitles(std::vector<std::string> rules);

  bool matches(std::string_view title) const;
  const std::vector<std::vector<std::string>>& rules() const noexcept { return rules_; }

 private:
  std::vector<std::vector<std::string>> rules_;  // each rule is a word sequence
};

// Fractional years between dates (days / 365.25), or -1 without a date.
// Throws DataError when `founded_on` is after `reference_date`.
double compute_age(const std::optional<Date>& founded_on, const Date& reference_date);

int derive_label(std::string_view org_id, const CompanyStore& store);

struct DeriveOptions {
  Date reference_date = kDefaultReferenceDate;
  ExecutiveTitles executive_titles = ExecutiveTitles::defaults();
};

// Total: never throws on data content. A founding date after the reference
// date yields age -1 with `age_anomaly` set.
CompanyProfile derive_profile(const OrganizationRow& org, const CompanyStore& store,
                              const DeriveOptions& options = {});

// Every organization in load order.
std::vector<CompanyProfile> derive_profiles(const CompanyStore& store,
                                            const DeriveOptions& options = {});

// ---------------------------------------------------------------------------
// Corpus statistics

using TokenCounter = std::function<std::size_t(std::string_view)>;

struct FeatureSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  double missing_rate = 0.0;  // before imputation
};

struct CorpusStats {
  std::size_t size = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double positive_ratio = 0.0;
  // Upper bucket edges (exclusive); the final bucket is open-ended.
  std::vector<std::size_t> length_bucket_edges;
  std::vector<std::size_t> length_histogram;
  std::array<FeatureSummary, 6> features{};

  nlohmann::ordered_json to_json() const;
};

CorpusStats corpus_stats(const std::vector<CompanyProfile>& profiles,
                         const TokenCounter& token_counter);

// ---------------------------------------------------------------------------
// Sampling and splitting

// Undersamples the majority class to the minority count. Input order is kept.
std::vector<CompanyProfile> balance_dataset(const std::vector<CompanyProfile>& profiles,
                                            std::uint64_t seed);

struct SplitSpec {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct Splits {
  std::vector<CompanyProfile> train;
  std::vector<CompanyProfile> val;
  std::vector<CompanyProfile> test;
};

// Largest-remainder sizes for `n` items; ties go to the earlier split.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec);

Splits split(const std::vector<CompanyProfile>& profiles, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::ordered_json profile_to_json(const CompanyProfile& p);
CompanyProfile profile_from_json(const nlohmann::ordered_json& j);

void write_profiles_jsonl(const std::filesystem::path& path,
                          const std::vector<CompanyProfile>& profiles);
std::vector<CompanyProfile> read_profiles_jsonl(const std::filesystem::path& path);
void write_profiles_csv(const std::filesystem::path& path,
                        const std::vector<CompanyProfile>& profiles);

}  // namespace exitbench
