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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "exitbench/date.hpp"
#include "exitbench/schema_ingest.hpp"

namespace exitbench {

enum class NoiseMode { kDeterministicThreshold, kLogisticSampling };
std::string_view noise_mode_name(NoiseMode m);
NoiseMode noise_mode_from_name(std::string_view name);

// Mechanism: latent = intercept + beta . z, where z holds the six profile
// features standardized against this config's own distribution parameters
// (see standardize()). Positives are realized as one IPO row or one
// acquisition row naming the company as acquiree.
struct SynthConfig {
  std::size_t n_companies = 1000;
  std::uint64_t seed = 7;
  NoiseMode mode = NoiseMode::kLogisticSampling;

  // Order: age, funding, rounds, investors, acquisitions made, executives.
  std::array<double, 6> beta = {0.3, 1.2, 0.4, 0.8, 0.2, 0.6};
  double intercept = 0.0;
  // When set, the intercept is solved for this positive rate instead.
  std::optional<double> target_positive_rate;

  double age_min_years = 0.5;
  double age_max_years = 20.0;
  double funding_log_mu = 15.0;  // log USD
  double funding_log_sigma = 1.5;
  double rounds_lambda = 2.0;
  double investors_lambda = 4.0;  // only companies with rounds get investors
  double acquisitions_lambda = 0.5;
  double executives_lambda = 3.0;
  double staff_lambda = 4.0;  // non-executive job rows
  std::size_t investor_pool = 500;
  double ipo_share = 0.5;  // P(IPO) for a positive; acquisitions otherwise
  // Probability that a positive's description mentions its exit, to exercise
  // the leakage guard.
  double leak_rate = 0.0;
  Date reference_date = Date::from_ymd(2025, 6, 11);

  struct MissingRates {
    double founded_on = 0.0;
    double created_at = 0.0;
    double description = 0.0;
    double raised_usd = 0.0;
    double announced_on = 0.0;
    double job_title = 0.0;
  } missing;

  void validate() const;

  // Flat `key = value` lines, `#` comments. Unknown keys raise UsageError.
  // Keys absent from the text keep their value in `base`.
  static SynthConfig parse(std::string_view text, SynthConfig base);
  static SynthConfig parse(std::string_view text);
  static SynthConfig load(const std::filesystem::path& path, SynthConfig base);
  static SynthConfig load(const std::filesystem::path& path);
  void set(std::string_view key, std::string_view value);
  std::string to_text() const;
};

// Raw feature values in profile order.
using FeatureRow = Eigen::Matrix<double, 6, 1>;

// z-scores against the config: uniform moments for age, the rounds-gated
// log-normal mixture (on log1p USD) for funding, Poisson moments for counts,
// and the rounds-gated Poisson mixture for investors. A degenerate
// distribution gives 0.
FeatureRow standardize(const FeatureRow& raw, const SynthConfig& config);

double latent_score(const FeatureRow& raw, const SynthConfig& config, double intercept);

// One simulated company before any table rows exist.
struct CompanyDraw {
  std::int64_t age_days = 0;
  std::int64_t rounds = 0;
  std::int64_t total_raised_usd = 0;
  std::int64_t investors = 0;
  std::int64_t executives = 0;
  std::int64_t staff = 0;
  std::int64_t acquisitions_made = 0;
  double latent = 0.0;
  double probability = 0.0;  // P(label = 1 | features)
  int label = 0;
  enum class Event { kNone, kIpo, kAcquisition } event = Event::kNone;
  std::int64_t acquirer = -1;  // index of a later company, for acquisitions

  FeatureRow features() const;
};

// Numeric core shared by generation, calibration and Bayes estimation.
// Companies are processed in index order; an acquiree picks its acquirer
// among later companies with remaining appetite, so a company's acquisition
// count is final before its own label is drawn.
std::vector<CompanyDraw> simulate(const SynthConfig& config, std::size_t n, std::uint64_t seed,
                                  double intercept);

// `intercept`, or the value hitting `target_positive_rate` on a fixed
// calibration sample.
double resolve_intercept(const SynthConfig& config);

struct GroundTruthRow {
  std::string org_id;
  double latent = 0.0;
  int label = 0;
};

struct SynthCorpus {
  Tables tables;  // after missingness
  std::vector<GroundTruthRow> ground_truth;
  std::vector<CompanyDraw> draws;
  double intercept = 0.0;
};

SynthCorpus synthesize(const SynthConfig& config);

// Writes the six tables (Crunchbase default columns) and ground_truth.jsonl.
SynthCorpus generate(const SynthConfig& config, const std::filesystem::path& out_dir);

void write_ground_truth(const std::filesystem::path& path, const std::vector<GroundTruthRow>& rows);
std::vector<GroundTruthRow> read_ground_truth(const std::filesystem::path& path);

struct BayesEstimate {
  double accuracy = 1.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

// Mean of max(p, 1 - p) over simulated companies. Exactly 1 in
// deterministic-threshold mode. Needs n_mc >= 1000.
BayesEstimate estimate_bayes_accuracy(const SynthConfig& config, std::size_t n_mc);

}  // namespace exitbench
