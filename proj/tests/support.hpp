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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "exitbench/feature_engine.hpp"
#include "exitbench/rng.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(EXITBENCH_SOURCE_DIR); }
inline fs::path fixture(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }
inline fs::path golden(const std::string& name) { return source_dir() / "tests" / "golden" / name; }

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    const auto stamp = std::to_string(std::rand()) + "_" + std::to_string(++counter);
    path_ = fs::temp_directory_path() / ("exitbench_" + tag + "_" + stamp);
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline exitbench::CompanyProfile fixture_profile() {
  return exitbench::profile_from_json(nlohmann::ordered_json::parse(slurp(fixture("profile.json"))));
}

// Regenerate goldens instead of comparing when EXITBENCH_UPDATE_GOLDENS=1.
inline bool update_goldens() {
  const char* v = std::getenv("EXITBENCH_UPDATE_GOLDENS");
  return v && std::string(v) == "1";
}

inline std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

// Random profile with plausible ranges; `pos` forces the label.
inline exitbench::CompanyProfile random_profile(exitbench::Rng& rng, std::size_t i, int label) {
  exitbench::CompanyProfile p;
  p.org_id = "org-" + std::to_string(i);
  p.name = "Company " + std::to_string(i);
  const int words = static_cast<int>(rng.index(60));
  for (int w = 0; w < words; ++w) p.description += (w ? " " : "") + std::string("word") + std::to_string(rng.index(50));
  p.age_years = rng.bernoulli(0.1) ? exitbench::kAgeUnknown : rng.uniform(0.0, 20.0);
  p.num_funding_rounds = static_cast<std::int64_t>(rng.index(6));
  p.total_raised_usd = p.num_funding_rounds ? std::floor(rng.uniform(1e4, 5e7)) : 0.0;
  p.num_investors = static_cast<std::int64_t>(rng.index(10));
  p.num_acquisitions_made = static_cast<std::int64_t>(rng.index(3));
  p.num_executives = static_cast<std::int64_t>(rng.index(8));
  p.success = label;
  p.had_ipo = label;
  return p;
}

}  // namespace testsupport
