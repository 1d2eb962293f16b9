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

#include "exitbench/feature_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "exitbench/csv.hpp"
#include "exitbench/error.hpp"
#include "exitbench/rng.hpp"
#include "exitbench/text.hpp"

namespace exitbench {

Eigen::Matrix<double, 6, 1> feature_vector(const CompanyProfile& p) {
  Eigen::Matrix<double, 6, 1> x;
  x << p.age_years, p.total_raised_usd, static_cast<double>(p.num_funding_rounds),
      static_cast<double>(p.num_investors), static_cast<double>(p.num_acquisitions_made),
      static_cast<double>(p.num_executives);
  return x;
}

Eigen::MatrixXd feature_matrix(const std::vector<CompanyProfile>& profiles) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(profiles.size()), 6);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = feature_vector(profiles[i]).transpose();
  }
  return X;
}

Eigen::VectorXi label_vector(const std::vector<CompanyProfile>& profiles) {
  Eigen::VectorXi y(static_cast<Eigen::Index>(profiles.size()));
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = profiles[i].success;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Executive titles

ExecutiveTitles ExecutiveTitles::defaults() {
  return ExecutiveTitles({"chief", "ceo", "cfo", "cto", "coo", "founder", "president", "vp",
                          "vice president"});
}

ExecutiveTitles ExecutiveTitles::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open executive title list " + path.string());
  std::vector<std::string> rules;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto body = text::trim(line);
    if (!body.empty()) rules.emplace_back(body);
  }
  return ExecutiveTitles(std::move(rules));
}

ExecutiveTitles::ExecutiveTitles(std::vector<std::string> rules) {
  for (const auto& r : rules) {
    auto w = text::words(r);
    if (!w.empty()) rules_.push_back(std::move(w));
  }
}

bool ExecutiveTitles::matches(std::string_view title) const {
  const auto w = text::words(title);
  for (const auto& rule : rules_) {
    if (rule.size() > w.size()) continue;
    for (std::size_t i = 0; i + rule.size() <= w.size(); ++i) {
      if (std::equal(rule.begin(), rule.end(), w.begin() + static_cast<std::ptrdiff_t>(i))) {
        return true;
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Derivations

double compute_age(const std::optional<Date>& founded_on, const Date& reference_date) {
  if (!founded_on) return kAgeUnknown;
  const auto days = days_between(*founded_on, reference_date);
  if (days < 0) {
    throw DataError("founding date " + founded_on->iso() + " is after reference date " +
                    reference_date.iso());
  }
  return static_cast<double>(days) / kDaysPerYear;
}

int derive_label(std::string_view org_id, const CompanyStore& store) {
  return !store.ipos_by_org(org_id).empty() || !store.acquisitions_by_acquiree(org_id).empty()
             ? 1
             : 0;
}

CompanyProfile derive_profile(const OrganizationRow& org, const CompanyStore& store,
                              const DeriveOptions& options) {
  const auto& t = store.tables();
  CompanyProfile p;
  p.org_id = org.org_id;
  p.name = org.name;
  p.description = org.description;

  std::optional<Date> founded;
  if (org.founded_on) {
    founded = org.founded_on;
    p.age_source = AgeSource::kFoundedOn;
  } else if (org.created_at) {
    founded = org.created_at;
    p.age_source = AgeSource::kCreatedAt;
  }
  if (founded && *founded > options.reference_date) {
    p.age_anomaly = true;
    p.age_years = kAgeUnknown;
  } else {
    p.age_years = compute_age(founded, options.reference_date);
  }

  const auto rounds = store.rounds_by_org(org.org_id);
  p.num_funding_rounds = static_cast<std::int64_t>(rounds.size());
  p.rounds_missing = rounds.empty();
  bool any_amount = false;
  std::unordered_set<std::string> investors;
  for (auto ri : rounds) {
    const auto& round = t.funding_rounds[ri];
    if (round.raised_usd) {
      p.total_raised_usd += *round.raised_usd;
      any_amount = true;
    }
    for (auto ii : store.investments_by_round(round.round_id)) {
      investors.insert(t.investments[ii].investor_id);
    }
  }
  p.raised_missing = !any_amount;
  p.num_investors = static_cast<std::int64_t>(investors.size());
  p.investors_missing = investors.empty();

  p.num_acquisitions_made =
      static_cast<std::int64_t>(store.acquisitions_by_acquirer(org.org_id).size());
  p.acquisitions_missing = p.num_acquisitions_made == 0;

  const auto jobs = store.jobs_by_org(org.org_id);
  p.executives_missing = jobs.empty();
  for (auto ji : jobs) {
    if (options.executive_titles.matches(t.jobs[ji].title)) ++p.num_executives;
  }

  p.had_ipo = store.ipos_by_org(org.org_id).empty() ? 0 : 1;
  p.was_acquired = store.acquisitions_by_acquiree(org.org_id).empty() ? 0 : 1;
  p.success = (p.had_ipo | p.was_acquired);
  return p;
}

std::vector<CompanyProfile> derive_profiles(const CompanyStore& store,
                                            const DeriveOptions& options) {
  std::vector<CompanyProfile> out;
  out.reserve(store.tables().organizations.size());
  for (const auto& org : store.tables().organizations) {
    out.push_back(derive_profile(org, store, options));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stats

namespace {

FeatureSummary summarize(std::vector<double> values, std::size_t missing) {
  FeatureSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const auto n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.missing_rate = static_cast<double>(missing) / static_cast<double>(n);
  return s;
}

}  // namespace

CorpusStats corpus_stats(const std::vector<CompanyProfile>& profiles,
                         const TokenCounter& token_counter) {
  CorpusStats s;
  s.length_bucket_edges = {8, 16, 32, 64, 128, 256};
  s.length_histogram.assign(s.length_bucket_edges.size() + 1, 0);
  s.size = profiles.size();

  std::array<std::vector<double>, 6> columns;
  std::array<std::size_t, 6> missing{};
  for (const auto& p : profiles) {
    if (p.success) {
      ++s.positives;
    } else {
      ++s.negatives;
    }
    const auto tokens = token_counter(p.description);
    const auto bucket = static_cast<std::size_t>(
        std::upper_bound(s.length_bucket_edges.begin(), s.length_bucket_edges.end(), tokens) -
        s.length_bucket_edges.begin());
    ++s.length_histogram[bucket];

    const auto x = feature_vector(p);
    for (int f = 0; f < 6; ++f) columns[static_cast<std::size_t>(f)].push_back(x(f));
    missing[0] += p.age_source == AgeSource::kMissing || p.age_anomaly;
    missing[1] += p.raised_missing;
    missing[2] += p.rounds_missing;
    missing[3] += p.investors_missing;
    missing[4] += p.acquisitions_missing;
    missing[5] += p.executives_missing;
  }
  if (s.size > 0) {
    s.positive_ratio = static_cast<double>(s.positives) / static_cast<double>(s.size);
  }
  for (std::size_t f = 0; f < 6; ++f) s.features[f] = summarize(columns[f], missing[f]);
  return s;
}

nlohmann::ordered_json CorpusStats::to_json() const {
  nlohmann::ordered_json j;
  j["size"] = size;
  j["positives"] = positives;
  j["negatives"] = negatives;
  j["positive_ratio"] = positive_ratio;
  nlohmann::ordered_json buckets = nlohmann::ordered_json::array();
  std::size_t lo = 0;
  for (std::size_t b = 0; b < length_histogram.size(); ++b) {
    nlohmann::ordered_json bucket;
    bucket["min_tokens"] = lo;
    if (b < length_bucket_edges.size()) {
      bucket["max_tokens_exclusive"] = length_bucket_edges[b];
      lo = length_bucket_edges[b];
    } else {
      bucket["max_tokens_exclusive"] = nullptr;
    }
    bucket["count"] = length_histogram[b];
    buckets.push_back(bucket);
  }
  j["description_length_histogram"] = buckets;
  nlohmann::ordered_json feats;
  for (std::size_t f = 0; f < features.size(); ++f) {
    feats[std::string(kFeatureNames[f])] = {{"min", features[f].min},
                                            {"median", features[f].median},
                                            {"max", features[f].max},
                                            {"missing_rate", features[f].missing_rate}};
  }
  j["features"] = feats;
  return j;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<CompanyProfile> balance_dataset(const std::vector<CompanyProfile>& profiles,
                                            std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    (profiles[i].success ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw DataError(std::string("cannot balance: no ") +
                    (pos.empty() ? "positive" : "negative") + " examples");
  }
  auto& majority = pos.size() > neg.size() ? pos : neg;
  const auto& minority = pos.size() > neg.size() ? neg : pos;
  Rng rng(seed);
  std::vector<std::size_t> kept;
  for (auto k : rng.sample_indices(majority.size(), minority.size())) kept.push_back(majority[k]);
  kept.insert(kept.end(), minority.begin(), minority.end());
  std::sort(kept.begin(), kept.end());
  std::vector<CompanyProfile> out;
  out.reserve(kept.size());
  for (auto i : kept) out.push_back(profiles[i]);
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec) {
  const std::array<double, 3> ratios = {spec.train, spec.val, spec.test};
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = ratios[i] * static_cast<double>(n);
    // Snap values within rounding noise of an integer before flooring.
    const double snapped = std::fabs(exact - std::round(exact)) < 1e-9 ? std::round(exact) : exact;
    sizes[i] = static_cast<std::size_t>(std::floor(snapped));
    remainder[i] = snapped - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++sizes[order[k]];
  return sizes;
}

Splits split(const std::vector<CompanyProfile>& profiles, const SplitSpec& spec) {
  for (double r : {spec.train, spec.val, spec.test}) {
    if (!(r > 0.0)) throw UsageError("split ratios must be positive");
  }
  if (std::fabs(spec.train + spec.val + spec.test - 1.0) > 1e-9) {
    throw UsageError("split ratios must sum to 1");
  }
  if (profiles.size() < 3) throw DataError("corpus too small to split (need at least 3)");

  Rng rng(spec.seed);
  std::array<std::vector<std::size_t>, 3> parts;
  auto deal = [&](std::vector<std::size_t> idx) {
    rng.shuffle(idx);
    const auto sizes = split_sizes(idx.size(), spec);
    std::size_t at = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      parts[s].insert(parts[s].end(), idx.begin() + static_cast<std::ptrdiff_t>(at),
                      idx.begin() + static_cast<std::ptrdiff_t>(at + sizes[s]));
      at += sizes[s];
    }
  };
  if (spec.stratified) {
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      (profiles[i].success ? pos : neg).push_back(i);
    }
    deal(std::move(pos));
    deal(std::move(neg));
  } else {
    std::vector<std::size_t> all(profiles.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    deal(std::move(all));
  }

  Splits out;
  std::array<std::vector<CompanyProfile>*, 3> targets = {&out.train, &out.val, &out.test};
  for (std::size_t s = 0; s < 3; ++s) {
    std::sort(parts[s].begin(), parts[s].end());
    for (auto i : parts[s]) targets[s]->push_back(profiles[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string_view age_source_name(AgeSource s) {
  switch (s) {
    case AgeSource::kFoundedOn:
      return "founded_on";
    case AgeSource::kCreatedAt:
      return "created_at";
    case AgeSource::kMissing:
      return "missing";
  }
  return "missing";
}

AgeSource age_source_from(std::string_view s) {
  if (s == "founded_on") return AgeSource::kFoundedOn;
  if (s == "created_at") return AgeSource::kCreatedAt;
  if (s == "missing") return AgeSource::kMissing;
  throw DataError("unknown age_source '" + std::string(s) + "'");
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

nlohmann::ordered_json profile_to_json(const CompanyProfile& p) {
  nlohmann::ordered_json j;
  j["org_id"] = p.org_id;
  j["name"] = p.name;
  j["description"] = p.description;
  j["age_years"] = p.age_years;
  j["total_raised_usd"] = p.total_raised_usd;
  j["num_funding_rounds"] = p.num_funding_rounds;
  j["num_investors"] = p.num_investors;
  j["num_acquisitions_made"] = p.num_acquisitions_made;
  j["num_executives"] = p.num_executives;
  j["had_ipo"] = p.had_ipo;
  j["was_acquired"] = p.was_acquired;
  j["success"] = p.success;
  j["provenance"] = {{"age_source", age_source_name(p.age_source)},
                     {"age_anomaly", p.age_anomaly},
                     {"raised_missing", p.raised_missing},
                     {"rounds_missing", p.rounds_missing},
                     {"investors_missing", p.investors_missing},
                     {"acquisitions_missing", p.acquisitions_missing},
                     {"executives_missing", p.executives_missing}};
  return j;
}

CompanyProfile profile_from_json(const nlohmann::ordered_json& j) {
  try {
    CompanyProfile p;
    p.org_id = j.at("org_id").get<std::string>();
    p.name = j.at("name").get<std::string>();
    p.description = j.at("description").get<std::string>();
    p.age_years = j.at("age_years").get<double>();
    p.total_raised_usd = j.at("total_raised_usd").get<double>();
    p.num_funding_rounds = j.at("num_funding_rounds").get<std::int64_t>();
    p.num_investors = j.at("num_investors").get<std::int64_t>();
    p.num_acquisitions_made = j.at("num_acquisitions_made").get<std::int64_t>();
    p.num_executives = j.at("num_executives").get<std::int64_t>();
    p.had_ipo = j.at("had_ipo").get<int>();
    p.was_acquired = j.at("was_acquired").get<int>();
    p.success = j.at("success").get<int>();
    if (j.contains("provenance")) {
      const auto& pv = j.at("provenance");
      p.age_source = age_source_from(pv.at("age_source").get<std::string>());
      p.age_anomaly = pv.at("age_anomaly").get<bool>();
      p.raised_missing = pv.at("raised_missing").get<bool>();
      p.rounds_missing = pv.at("rounds_missing").get<bool>();
      p.investors_missing = pv.at("investors_missing").get<bool>();
      p.acquisitions_missing = pv.at("acquisitions_missing").get<bool>();
      p.executives_missing = pv.at("executives_missing").get<bool>();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed profile record: ") + e.what());
  }
}

void write_profiles_jsonl(const std::filesystem::path& path,
                          const std::vector<CompanyProfile>& profiles) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& p : profiles) out << profile_to_json(p).dump() << '\n';
  if (!out) throw IoError("write failure on " + path.string());
}

std::vector<CompanyProfile> read_profiles_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("missing input " + path.string());
  std::vector<CompanyProfile> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(profile_from_json(j));
  }
  return out;
}

void write_profiles_csv(const std::filesystem::path& path,
                        const std::vector<CompanyProfile>& profiles) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  csv::write_row(out, {"org_id", "name", "description", "age_years", "total_raised_usd",
                       "num_funding_rounds", "num_investors", "num_acquisitions_made",
                       "num_executives", "had_ipo", "was_acquired", "success"});
  for (const auto& p : profiles) {
    csv::write_row(out, {p.org_id, p.name, p.description, format_real(p.age_years),
                         format_real(p.total_raised_usd), std::to_string(p.num_funding_rounds),
                         std::to_string(p.num_investors),
                         std::to_string(p.num_acquisitions_made),
                         std::to_string(p.num_executives), std::to_string(p.had_ipo),
                         std::to_string(p.was_acquired), std::to_string(p.success)});
  }
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace exitbench
