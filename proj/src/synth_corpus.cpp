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

#include "exitbench/synth_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "exitbench/error.hpp"
#include "exitbench/rng.hpp"
#include "exitbench/text.hpp"

namespace exitbench {
namespace {

constexpr std::size_t kCalibrationSize = 20000;
constexpr int kCalibrationIterations = 60;

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double zscore(double x, double mean, double var) { return var > 0.0 ? (x - mean) / std::sqrt(var) : 0.0; }

// Fenwick tree over non-negative integer weights.
class WeightTree {
 public:
  explicit WeightTree(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t i, std::int64_t delta) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }
  // Sum over [0, i).
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }
  // Smallest i with prefix(i + 1) > target.
  std::size_t upper(std::int64_t target) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<std::int64_t> tree_;
};

std::string uuid(Rng& rng) {
  const std::uint64_t a = rng.next_u64();
  const std::uint64_t b = rng.next_u64();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%08llx-%04llx-4%03llx-%04llx-%012llx",
                static_cast<unsigned long long>(a >> 32),
                static_cast<unsigned long long>((a >> 16) & 0xffff),
                static_cast<unsigned long long>(a & 0xfff),
                static_cast<unsigned long long>(0x8000 | ((b >> 48) & 0x3fff)),
                static_cast<unsigned long long>(b & 0xffffffffffffULL));
  return buf;
}

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& options) {
  return options[rng.index(N)];
}

constexpr std::array<std::string_view, 18> kNameHeads = {
    "Nex", "Vor", "Lum", "Kai", "Zen", "Bri", "Tal", "Quor", "Mav",
    "Sol", "Ard", "Fen", "Oro", "Vel", "Cal", "Dyn", "Ember", "Hal"};
constexpr std::array<std::string_view, 10> kNameTails = {"ora", "ix", "io",  "en", "ara",
                                                         "eon", "ity", "yx", "ant", "ium"};
constexpr std::array<std::string_view, 12> kNameSuffixes = {
    "Labs",   "Systems", "Analytics", "Health", "Robotics", "Networks",
    "Bio",    "Energy",  "AI",        "Cloud",  "Works",    "Dynamics"};
constexpr std::array<std::string_view, 8> kProducts = {
    "analytics software",   "payment infrastructure", "diagnostic tools",
    "logistics software",   "energy storage systems", "developer tooling",
    "security software",    "consumer apps"};
constexpr std::array<std::string_view, 7> kMarkets = {
    "small businesses", "hospitals", "retailers", "manufacturers", "financial institutions",
    "consumers", "public agencies"};
constexpr std::array<std::string_view, 10> kExecutiveTitles = {
    "CEO", "Co-Founder", "Founder & CEO", "CTO", "CFO", "COO", "Chief Product Officer",
    "VP Engineering", "Vice President of Sales", "President"};
constexpr std::array<std::string_view, 8> kStaffTitles = {
    "Software Engineer", "Product Manager", "Designer",         "Sales Associate",
    "Director of Marketing", "Head of Operations", "Data Scientist", "Account Executive"};
constexpr std::array<std::string_view, 2> kLeakSentences = {
    " It later completed an IPO.", " It was acquired by a larger rival."};

bool leaks(std::string_view s) {
  return text::contains_ci(s, "ipo") || text::contains_ci(s, "acquired") ||
         text::contains_ci(s, "acquisition");
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string v(text::trim(value));
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size()) {
    throw UsageError("synth config: '" + std::string(key) + "' expects a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  const double d = parse_double(key, value);
  if (d < 0 || d != std::floor(d) || d > 1.8e19) {
    throw UsageError("synth config: '" + std::string(key) + "' expects a non-negative integer");
  }
  return static_cast<std::uint64_t>(std::stoull(std::string(text::trim(value))));
}

constexpr std::array<std::string_view, 6> kBetaKeys = {
    "beta.age", "beta.funding", "beta.rounds", "beta.investors", "beta.acquisitions",
    "beta.executives"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string_view noise_mode_name(NoiseMode m) {
  return m == NoiseMode::kDeterministicThreshold ? "deterministic-threshold" : "logistic-sampling";
}

NoiseMode noise_mode_from_name(std::string_view name) {
  const auto n = text::to_lower_ascii(text::trim(name));
  if (n == "deterministic-threshold" || n == "deterministic") return NoiseMode::kDeterministicThreshold;
  if (n == "logistic-sampling" || n == "logistic") return NoiseMode::kLogisticSampling;
  throw UsageError("unknown noise mode '" + std::string(name) + "'");
}

void SynthConfig::validate() const {
  auto rate = [](double r, const char* what) {
    if (!(r >= 0.0 && r < 1.0)) throw UsageError(std::string(what) + " must lie in [0, 1)");
  };
  rate(missing.founded_on, "missing.founded_on");
  rate(missing.created_at, "missing.created_at");
  rate(missing.description, "missing.description");
  rate(missing.raised_usd, "missing.raised_usd");
  rate(missing.announced_on, "missing.announced_on");
  rate(missing.job_title, "missing.job_title");
  if (!(leak_rate >= 0.0 && leak_rate <= 1.0)) throw UsageError("leak_rate must lie in [0, 1]");
  if (!(ipo_share >= 0.0 && ipo_share <= 1.0)) throw UsageError("ipo_share must lie in [0, 1]");
  if (!(age_min_years >= 0.0) || !(age_max_years >= age_min_years)) {
    throw UsageError("age range must satisfy 0 <= age_min_years <= age_max_years");
  }
  if (!(funding_log_sigma >= 0.0) || !std::isfinite(funding_log_mu)) {
    throw UsageError("funding log-normal parameters are invalid");
  }
  for (double l : {rounds_lambda, investors_lambda, acquisitions_lambda, executives_lambda,
                   staff_lambda}) {
    if (!(l >= 0.0) || l > 500.0) throw UsageError("Poisson rates must lie in [0, 500]");
  }
  if (investor_pool == 0) throw UsageError("investor_pool must be positive");
  for (double b : beta) {
    if (!std::isfinite(b)) throw UsageError("beta coefficients must be finite");
  }
  if (!std::isfinite(intercept)) throw UsageError("intercept must be finite");
  if (target_positive_rate && !(*target_positive_rate > 0.0 && *target_positive_rate < 1.0)) {
    throw UsageError("target_positive_rate must lie in (0, 1)");
  }
}

void SynthConfig::set(std::string_view key_in, std::string_view value) {
  const std::string key(text::trim(key_in));
  const std::string v(text::trim(value));
  for (std::size_t i = 0; i < kBetaKeys.size(); ++i) {
    if (key == kBetaKeys[i]) {
      beta[i] = parse_double(key, v);
      return;
    }
  }
  if (key == "n_companies") {
    n_companies = parse_u64(key, v);
  } else if (key == "seed") {
    seed = parse_u64(key, v);
  } else if (key == "mode") {
    mode = noise_mode_from_name(v);
  } else if (key == "intercept") {
    intercept = parse_double(key, v);
  } else if (key == "target_positive_rate") {
    if (v.empty() || text::to_lower_ascii(v) == "none") {
      target_positive_rate.reset();
    } else {
      target_positive_rate = parse_double(key, v);
    }
  } else if (key == "age_min_years") {
    age_min_years = parse_double(key, v);
  } else if (key == "age_max_years") {
    age_max_years = parse_double(key, v);
  } else if (key == "funding_log_mu") {
    funding_log_mu = parse_double(key, v);
  } else if (key == "funding_log_sigma") {
    funding_log_sigma = parse_double(key, v);
  } else if (key == "rounds_lambda") {
    rounds_lambda = parse_double(key, v);
  } else if (key == "investors_lambda") {
    investors_lambda = parse_double(key, v);
  } else if (key == "acquisitions_lambda") {
    acquisitions_lambda = parse_double(key, v);
  } else if (key == "executives_lambda") {
    executives_lambda = parse_double(key, v);
  } else if (key == "staff_lambda") {
    staff_lambda = parse_double(key, v);
  } else if (key == "investor_pool") {
    investor_pool = parse_u64(key, v);
  } else if (key == "ipo_share") {
    ipo_share = parse_double(key, v);
  } else if (key == "leak_rate") {
    leak_rate = parse_double(key, v);
  } else if (key == "reference_date") {
    const auto d = Date::parse(v);
    if (!d) throw UsageError("reference_date must be YYYY-MM-DD");
    reference_date = *d;
  } else if (key == "missing.founded_on") {
    missing.founded_on = parse_double(key, v);
  } else if (key == "missing.created_at") {
    missing.created_at = parse_double(key, v);
  } else if (key == "missing.description") {
    missing.description = parse_double(key, v);
  } else if (key == "missing.raised_usd") {
    missing.raised_usd = parse_double(key, v);
  } else if (key == "missing.announced_on") {
    missing.announced_on = parse_double(key, v);
  } else if (key == "missing.job_title") {
    missing.job_title = parse_double(key, v);
  } else {
    throw UsageError("unknown synth config key '" + key + "'");
  }
}

SynthConfig SynthConfig::parse(std::string_view text_in, SynthConfig base) {
  std::istringstream in{std::string(text_in)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("synth config line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(body.substr(0, eq), body.substr(eq + 1));
  }
  base.validate();
  return base;
}

SynthConfig SynthConfig::load(const std::filesystem::path& path, SynthConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("synth config not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::move(base));
}

SynthConfig SynthConfig::parse(std::string_view text_in) { return parse(text_in, SynthConfig{}); }

SynthConfig SynthConfig::load(const std::filesystem::path& path) { return load(path, SynthConfig{}); }

std::string SynthConfig::to_text() const {
  std::ostringstream os;
  os << "n_companies = " << n_companies << "\n"
     << "seed = " << seed << "\n"
     << "mode = " << noise_mode_name(mode) << "\n";
  for (std::size_t i = 0; i < kBetaKeys.size(); ++i) os << kBetaKeys[i] << " = " << fmt(beta[i]) << "\n";
  os << "intercept = " << fmt(intercept) << "\n"
     << "target_positive_rate = " << (target_positive_rate ? fmt(*target_positive_rate) : "none") << "\n"
     << "age_min_years = " << fmt(age_min_years) << "\n"
     << "age_max_years = " << fmt(age_max_years) << "\n"
     << "funding_log_mu = " << fmt(funding_log_mu) << "\n"
     << "funding_log_sigma = " << fmt(funding_log_sigma) << "\n"
     << "rounds_lambda = " << fmt(rounds_lambda) << "\n"
     << "investors_lambda = " << fmt(investors_lambda) << "\n"
     << "acquisitions_lambda = " << fmt(acquisitions_lambda) << "\n"
     << "executives_lambda = " << fmt(executives_lambda) << "\n"
     << "staff_lambda = " << fmt(staff_lambda) << "\n"
     << "investor_pool = " << investor_pool << "\n"
     << "ipo_share = " << fmt(ipo_share) << "\n"
     << "leak_rate = " << fmt(leak_rate) << "\n"
     << "reference_date = " << reference_date.iso() << "\n"
     << "missing.founded_on = " << fmt(missing.founded_on) << "\n"
     << "missing.created_at = " << fmt(missing.created_at) << "\n"
     << "missing.description = " << fmt(missing.description) << "\n"
     << "missing.raised_usd = " << fmt(missing.raised_usd) << "\n"
     << "missing.announced_on = " << fmt(missing.announced_on) << "\n"
     << "missing.job_title = " << fmt(missing.job_title) << "\n";
  return os.str();
}

FeatureRow standardize(const FeatureRow& raw, const SynthConfig& c) {
  FeatureRow z;
  const double age_mean = 0.5 * (c.age_min_years + c.age_max_years);
  const double age_span = c.age_max_years - c.age_min_years;
  z(0) = zscore(raw(0), age_mean, age_span * age_span / 12.0);

  // Funding and investors are zero unless the company has at least one round.
  const double q = 1.0 - std::exp(-c.rounds_lambda);
  const double mu = c.funding_log_mu;
  const double s2 = c.funding_log_sigma * c.funding_log_sigma;
  const double f_mean = q * mu;
  z(1) = zscore(std::log1p(raw(1)), f_mean, q * (s2 + mu * mu) - f_mean * f_mean);

  z(2) = zscore(raw(2), c.rounds_lambda, c.rounds_lambda);

  const double li = c.investors_lambda;
  const double i_mean = q * li;
  z(3) = zscore(raw(3), i_mean, q * (li + li * li) - i_mean * i_mean);

  z(4) = zscore(raw(4), c.acquisitions_lambda, c.acquisitions_lambda);
  z(5) = zscore(raw(5), c.executives_lambda, c.executives_lambda);
  return z;
}

double latent_score(const FeatureRow& raw, const SynthConfig& config, double intercept) {
  const Eigen::Map<const FeatureRow> beta(config.beta.data());
  return intercept + beta.dot(standardize(raw, config));
}

FeatureRow CompanyDraw::features() const {
  FeatureRow f;
  f << static_cast<double>(age_days) / 365.25, static_cast<double>(total_raised_usd),
      static_cast<double>(rounds), static_cast<double>(investors),
      static_cast<double>(acquisitions_made), static_cast<double>(executives);
  return f;
}

std::vector<CompanyDraw> simulate(const SynthConfig& c, std::size_t n, std::uint64_t seed,
                                  double intercept) {
  Rng rng(derive_seed(seed, "synth.core"));
  Rng appetite_rng(derive_seed(seed, "synth.appetite"));
  std::vector<CompanyDraw> out(n);
  WeightTree appetite(n);
  for (std::size_t j = 0; j < n; ++j) appetite.add(j, appetite_rng.poisson(c.acquisitions_lambda));

  for (std::size_t i = 0; i < n; ++i) {
    CompanyDraw& d = out[i];
    d.age_days = std::llround(rng.uniform(c.age_min_years, c.age_max_years) * 365.25);
    d.rounds = rng.poisson(c.rounds_lambda);
    if (d.rounds > 0) {
      d.total_raised_usd = std::max<std::int64_t>(
          d.rounds, std::llround(rng.lognormal(c.funding_log_mu, c.funding_log_sigma)));
      d.investors = std::min<std::int64_t>(rng.poisson(c.investors_lambda),
                                           static_cast<std::int64_t>(c.investor_pool));
    }
    d.executives = rng.poisson(c.executives_lambda);
    d.staff = rng.poisson(c.staff_lambda);

    d.latent = latent_score(d.features(), c, intercept);
    const double u = rng.uniform();
    if (c.mode == NoiseMode::kDeterministicThreshold) {
      d.label = d.latent > 0.0 ? 1 : 0;
      d.probability = d.label;
    } else {
      d.probability = sigmoid(d.latent);
      d.label = u < d.probability ? 1 : 0;
    }
    if (!d.label) continue;

    d.event = CompanyDraw::Event::kIpo;
    const bool wants_acquisition = !rng.bernoulli(c.ipo_share);
    const std::int64_t before = appetite.prefix(i + 1);
    const std::int64_t later = appetite.prefix(n) - before;
    if (wants_acquisition && later > 0) {
      const auto target = before + static_cast<std::int64_t>(rng.index(static_cast<std::uint64_t>(later)));
      const std::size_t j = appetite.upper(target);
      appetite.add(j, -1);
      ++out[j].acquisitions_made;
      d.event = CompanyDraw::Event::kAcquisition;
      d.acquirer = static_cast<std::int64_t>(j);
    }
  }
  return out;
}

double resolve_intercept(const SynthConfig& config) {
  config.validate();
  if (!config.target_positive_rate) return config.intercept;
  const double target = *config.target_positive_rate;
  const std::uint64_t seed = derive_seed(config.seed, "synth.calibrate");
  auto rate = [&](double b) {
    const auto draws = simulate(config, kCalibrationSize, seed, b);
    std::size_t pos = 0;
    for (const auto& d : draws) pos += static_cast<std::size_t>(d.label);
    return static_cast<double>(pos) / static_cast<double>(draws.size());
  };
  // The positive rate is non-decreasing in the intercept under common random
  // numbers.
  double lo = -20.0;
  double hi = 20.0;
  for (int it = 0; it < kCalibrationIterations && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rate(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SynthCorpus synthesize(const SynthConfig& c) {
  c.validate();
  SynthCorpus corpus;
  corpus.intercept = resolve_intercept(c);
  const std::size_t n = c.n_companies;
  corpus.draws = simulate(c, n, c.seed, corpus.intercept);

  Rng ids(derive_seed(c.seed, "synth.ids"));
  Rng words(derive_seed(c.seed, "synth.text"));
  Rng links(derive_seed(c.seed, "synth.links"));
  Rng dates(derive_seed(c.seed, "synth.dates"));

  std::vector<std::string> investor_ids(c.investor_pool);
  for (auto& id : investor_ids) id = uuid(ids);

  Tables& t = corpus.tables;
  std::vector<std::string> org_ids(n);
  for (auto& id : org_ids) id = uuid(ids);

  std::unordered_set<std::string> names;
  auto random_day = [&](const Date& from, std::int64_t span_days) {
    return Date::from_days(from.days_since_epoch() +
                           static_cast<std::int64_t>(dates.index(static_cast<std::uint64_t>(span_days) + 1)));
  };

  for (std::size_t i = 0; i < n; ++i) {
    const CompanyDraw& d = corpus.draws[i];
    OrganizationRow org;
    org.org_id = org_ids[i];
    do {
      org.name = std::string(pick(words, kNameHeads)) + std::string(pick(words, kNameTails)) + " " +
                 std::string(pick(words, kNameSuffixes));
      if (names.count(org.name)) org.name += " " + std::to_string(i + 1);
    } while (leaks(org.name));
    names.insert(org.name);
    org.description = org.name + " builds " + std::string(pick(words, kProducts)) + " for " +
                      std::string(pick(words, kMarkets)) + ".";
    if (d.label && words.bernoulli(c.leak_rate)) {
      org.description += std::string(kLeakSentences[d.event == CompanyDraw::Event::kIpo ? 0 : 1]);
    }
    const Date founded = Date::from_days(c.reference_date.days_since_epoch() - d.age_days);
    org.founded_on = founded;
    org.created_at = random_day(founded, std::min<std::int64_t>(d.age_days, 1095));
    t.organizations.push_back(std::move(org));

    // Funding: whole-USD amounts, each round at least 1, summing to the total.
    if (d.rounds > 0) {
      std::vector<double> w(static_cast<std::size_t>(d.rounds));
      double wsum = 0.0;
      for (auto& x : w) wsum += (x = links.uniform(0.2, 1.0));
      const std::int64_t spare = d.total_raised_usd - d.rounds;
      std::int64_t assigned = 0;
      std::vector<Date> round_dates;
      for (std::int64_t r = 0; r < d.rounds; ++r) round_dates.push_back(random_day(founded, d.age_days));
      std::sort(round_dates.begin(), round_dates.end());
      const std::size_t first_round = t.funding_rounds.size();
      for (std::size_t r = 0; r < w.size(); ++r) {
        std::int64_t share = r + 1 == w.size()
                                 ? spare - assigned
                                 : static_cast<std::int64_t>(std::floor(static_cast<double>(spare) * w[r] / wsum));
        share = std::min(share, spare - assigned);
        assigned += share;
        FundingRoundRow round;
        round.round_id = uuid(ids);
        round.org_id = org_ids[i];
        round.announced_on = round_dates[r];
        round.raised_usd = static_cast<double>(1 + share);
        t.funding_rounds.push_back(std::move(round));
      }
      // Investors: every chosen investor backs one round, some back a second.
      const auto chosen = links.sample_indices(investor_ids.size(), static_cast<std::size_t>(d.investors));
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        const std::size_t r = k < w.size() ? k : static_cast<std::size_t>(links.index(w.size()));
        t.investments.push_back({t.funding_rounds[first_round + r].round_id, investor_ids[chosen[k]]});
        if (w.size() > 1 && links.bernoulli(0.3)) {
          const std::size_t extra = (r + 1 + static_cast<std::size_t>(links.index(w.size() - 1))) % w.size();
          t.investments.push_back({t.funding_rounds[first_round + extra].round_id, investor_ids[chosen[k]]});
        }
      }
    }

    for (std::int64_t e = 0; e < d.executives; ++e) {
      t.jobs.push_back({org_ids[i], uuid(ids), std::string(pick(words, kExecutiveTitles))});
    }
    for (std::int64_t s = 0; s < d.staff; ++s) {
      t.jobs.push_back({org_ids[i], uuid(ids), std::string(pick(words, kStaffTitles))});
    }

    if (d.event == CompanyDraw::Event::kIpo) {
      t.ipos.push_back({org_ids[i], random_day(founded, d.age_days)});
    } else if (d.event == CompanyDraw::Event::kAcquisition) {
      t.acquisitions.push_back({org_ids[i], org_ids[static_cast<std::size_t>(d.acquirer)],
                                random_day(founded, d.age_days)});
    }
    corpus.ground_truth.push_back({org_ids[i], d.latent, d.label});
  }

  // Missingness comes last so labels and the latent never see it.
  Rng miss(derive_seed(c.seed, "synth.missing"));
  for (auto& org : t.organizations) {
    if (miss.bernoulli(c.missing.founded_on)) org.founded_on.reset();
    if (miss.bernoulli(c.missing.created_at)) org.created_at.reset();
    if (miss.bernoulli(c.missing.description)) org.description.clear();
  }
  for (auto& r : t.funding_rounds) {
    if (miss.bernoulli(c.missing.raised_usd)) r.raised_usd.reset();
    if (miss.bernoulli(c.missing.announced_on)) r.announced_on.reset();
  }
  for (auto& r : t.ipos) {
    if (miss.bernoulli(c.missing.announced_on)) r.went_public_on.reset();
  }
  for (auto& r : t.acquisitions) {
    if (miss.bernoulli(c.missing.announced_on)) r.announced_on.reset();
  }
  for (auto& j : t.jobs) {
    if (miss.bernoulli(c.missing.job_title)) j.title.clear();
  }
  return corpus;
}

SynthCorpus generate(const SynthConfig& config, const std::filesystem::path& out_dir) {
  SynthCorpus corpus = synthesize(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_tables(out_dir, corpus.tables, ColumnMapping::crunchbase_defaults());
  write_ground_truth(out_dir / "ground_truth.jsonl", corpus.ground_truth);
  return corpus;
}

void write_ground_truth(const std::filesystem::path& path, const std::vector<GroundTruthRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : rows) {
    nlohmann::ordered_json j = {{"org_id", r.org_id}, {"latent", r.latent}, {"label", r.label}};
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<GroundTruthRow> read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("ground truth not found: " + path.string());
  std::vector<GroundTruthRow> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("org_id").get<std::string>(), j.at("latent").get<double>(),
                     j.at("label").get<int>()});
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

BayesEstimate estimate_bayes_accuracy(const SynthConfig& config, std::size_t n_mc) {
  if (n_mc < 1000) throw UsageError("Bayes accuracy estimation needs n_mc >= 1000");
  BayesEstimate est;
  est.samples = n_mc;
  if (config.mode == NoiseMode::kDeterministicThreshold) return est;
  const double b = resolve_intercept(config);
  const auto draws = simulate(config, n_mc, derive_seed(config.seed, "synth.bayes"), b);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n_mc));
  for (std::size_t i = 0; i < n_mc; ++i) {
    v(static_cast<Eigen::Index>(i)) = std::max(draws[i].probability, 1.0 - draws[i].probability);
  }
  est.accuracy = v.mean();
  const double var = (v.array() - est.accuracy).square().sum() / static_cast<double>(n_mc - 1);
  est.standard_error = std::sqrt(var / static_cast<double>(n_mc));
  return est;
}

}  // namespace exitbench
