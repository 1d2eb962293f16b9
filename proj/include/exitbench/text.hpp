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

#include <string>
#include <string_view>
#include <vector>

namespace exitbench::text {

// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view in);

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

// Removes every case-insensitive occurrence of each needle, repeating until
// none remain (removal can splice a new occurrence together).
std::string strip_ci(std::string_view s, const std::vector<std::string>& needles);

// Collapses runs of whitespace (including newlines) into single spaces.
std::string collapse_whitespace(std::string_view s);

// Splits lowercased text into ASCII alphanumeric words.
std::vector<std::string> words(std::string_view s);

// `1000000` for integral values, `1234.50` otherwise.
std::string format_amount(double v);

}  // namespace exitbench::text
