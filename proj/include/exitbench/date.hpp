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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace exitbench {

// Proleptic Gregorian calendar date with day resolution.
class Date {
 public:
  constexpr Date() = default;

  // Throws DataError on an impossible date.
  static Date from_ymd(int year, unsigned month, unsigned day);
  static Date from_days(std::int64_t days_since_epoch);

  // Accepts `YYYY-MM-DD`, optionally followed by a time part (`T...` or
  // ` ...`), which is dropped. Returns nullopt for anything else.
  static std::optional<Date> parse(std::string_view text);

  int year() const noexcept { return year_; }
  unsigned month() const noexcept { return month_; }
  unsigned day() const noexcept { return day_; }

  // Days since 1970-01-01.
  std::int64_t days_since_epoch() const noexcept;

  std::string iso() const;

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  int year_ = 1970;
  unsigned month_ = 1;
  unsigned day_ = 1;
};

inline std::int64_t days_between(const Date& from, const Date& to) noexcept {
  return to.days_since_epoch() - from.days_since_epoch();
}

}  // namespace exitbench
