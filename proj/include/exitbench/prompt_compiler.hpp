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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "exitbench/feature_engine.hpp"

namespace exitbench {

inline constexpr std::string_view kChatStart = "<|im_start|>";
inline constexpr std::string_view kChatEnd = "<|im_end|>";
inline constexpr std::string_view kEllipsis = "\xE2\x80\xA6";  // U+2026
inline constexpr std::size_t kDefaultTokenBudget = 256;

inline constexpr std::string_view kPositiveKeyword = "Successful";
inline constexpr std::string_view kNegativeKeyword = "Unsuccessful";

enum class Role { kSystem, kUser, kAssistant };
std::string_view role_name(Role role);
Role role_from_name(std::string_view name);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

// Prompt variants, each adding one refinement to the one before:
//  V2 separates the prediction and justification tasks,
//  V3 encodes the profile as a structured block,
//  V4 requires grounded justifications and a strict answer format.
enum class PromptVariant { kV1 = 1, kV2 = 2, kV3 = 3, kV4 = 4 };
std::string_view variant_name(PromptVariant v);
PromptVariant variant_from_name(std::string_view name);  // "V1".."V4", case-insensitive

struct VariantFeatures {
  bool two_task_instruction = false;
  bool structured_profile = false;
  bool grounded_justification = false;
  bool strict_format = false;
};
VariantFeatures variant_features(PromptVariant v);

// Built-in instruction template for a variant (the data/templates/*.txt text).
std::string_view builtin_template(PromptVariant v);

enum class PromptMode { kInference, kSft };
std::string_view mode_name(PromptMode m);
PromptMode mode_from_name(std::string_view name);

struct RecordMetadata {
  std::string org_id;
  PromptVariant variant = PromptVariant::kV4;
  PromptMode mode = PromptMode::kSft;
  std::string split;
  friend bool operator==(const RecordMetadata&, const RecordMetadata&) = default;
};

// Byte range of the (possibly empty) description value inside one message;
// the only region budget enforcement may cut.
struct DescriptionSpan {
  std::size_t message = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
  friend bool operator==(const DescriptionSpan&, const DescriptionSpan&) = default;
};

struct ChatRecord {
  std::vector<ChatMessage> messages;
  RecordMetadata metadata;
  std::optional<DescriptionSpan> description;
  friend bool operator==(const ChatRecord&, const ChatRecord&) = default;
};

// A chat record plus its supervised targets. Inference-mode records carry the
// targets too (for scoring) but end on the user turn.
struct SftRecord {
  ChatRecord chat;
  int target_label = 0;
  std::string target_justification;
  friend bool operator==(const SftRecord&, const SftRecord&) = default;
};

struct RenderOptions {
  bool include_description = true;
  // Strips "IPO", "acquired", "acquisition" (any case) from free text.
  bool leakage_guard = true;
  // Per-variant template overrides; built-ins otherwise.
  std::map<PromptVariant, std::string> templates;
};

// Free text as it appears in prompts: whitespace collapsed, chat markers
// removed, leakage terms stripped when guarded.
std::string clean_free_text(std::string_view s, bool leakage_guard);

std::string format_age(double age_years);

// `Field: value` lines in fixed order: Name, Age, Total raised USD, Funding
// rounds, Distinct investors, Acquisitions made, Executives, Description.
// Under the leakage guard the acquisitions line reads `Companies bought`.
std::string render_profile_block(const CompanyProfile& profile, const RenderOptions& options = {});

// Tier-based sentence aligned with the label. Depends only on the label and
// the funding / investor / executive tiers.
std::string template_justification(const CompanyProfile& profile);

inline constexpr double kStrongFundingUsd = 10'000'000.0;
inline constexpr double kModerateFundingUsd = 1'000'000.0;
inline constexpr std::int64_t kManyInvestors = 5;
inline constexpr std::int64_t kLargeExecutiveTeam = 5;

std::string target_text(int label, std::string_view justification);

SftRecord render_prompt(const CompanyProfile& profile, PromptVariant variant, PromptMode mode,
                        const std::vector<SftRecord>& exemplars = {},
                        const RenderOptions& options = {});

// Throws DataError when a message contains a chat marker.
std::string serialize_chat(const ChatRecord& record);
std::string serialize_chat(const std::vector<ChatMessage>& messages);
// Inverse of serialize_chat; throws DataError on malformed input.
std::vector<ChatMessage> parse_chat(std::string_view text);

// Shrinks the description region (rightmost tokens first, ellipsis appended)
// until the serialized record fits. Throws DataError when it cannot fit.
SftRecord enforce_budget(const SftRecord& record, std::size_t max_tokens,
                         const TokenCounter& token_counter);

// Exactly k records, classes equal within one, seeded. Input order is kept.
std::vector<SftRecord> sample_fewshot(const std::vector<SftRecord>& records, std::size_t k,
                                      std::uint64_t seed);

nlohmann::ordered_json record_to_json(const SftRecord& record);
SftRecord record_from_json(const nlohmann::ordered_json& j);

std::size_t emit_jsonl(const std::vector<SftRecord>& records, const std::filesystem::path& path);
std::vector<SftRecord> read_records_jsonl(const std::filesystem::path& path);

// Fine-tuning configuration manifest. Overrides are `dotted.key -> value`,
// with values parsed as JSON when possible and kept as strings otherwise.
nlohmann::ordered_json training_manifest(const std::map<std::string, std::string>& overrides = {});
std::string emit_training_manifest(const std::map<std::string, std::string>& overrides = {});

}  // namespace exitbench
