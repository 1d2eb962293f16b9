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

#include <cstddef>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

namespace exitbench {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Ratios with a vanishing denominator are 0.
struct ClassificationReport {
  double accuracy = 0.0;
  double precision = 0.0;  // positive class
  double recall = 0.0;     // positive class
  double f1_positive = 0.0;
  double f1_negative = 0.0;
  double f1_macro = 0.0;
  std::size_t support_positive = 0;
  std::size_t support_negative = 0;
  ConfusionMatrix confusion;

  nlohmann::ordered_json to_json() const;
  // Aligned plain-text table.
  std::string to_table() const;
};

// Throws DataError on length mismatch, empty input or non-binary values.
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

// Throws DataError for an empty matrix.
ClassificationReport report(const ConfusionMatrix& cm);

}  // namespace exitbench
