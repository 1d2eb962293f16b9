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

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace exitbench::csv {

struct Record {
  std::size_t line = 0;  // 1-based physical line the record starts on
  std::vector<std::string> fields;
  bool malformed = false;  // e.g. unterminated quote
};

// RFC-4180 reader: quoted fields may hold commas, doubled quotes and line
// breaks. Accepts CRLF or LF. Fields are UTF-8 sanitized. Blank lines are
// skipped and do not count as records.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns false at end of input.
  bool next(Record& out);

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::vector<Record> read_file(const std::filesystem::path& path);

// Quotes a field only when it has to.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace exitbench::csv
