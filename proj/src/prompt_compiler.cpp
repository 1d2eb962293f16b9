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

#include "exitbench/prompt_compiler.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "exitbench/error.hpp"
#include "exitbench/rng.hpp"
#include "exitbench/text.hpp"
#include "exitbench/token_counter.hpp"

namespace exitbench {
namespace {

const std::vector<std::string> kLeakageTerms = {"ipo", "acquired", "acquisition"};

constexpr std::string_view kProfilePlaceholder = "{profile}";
constexpr std::string_view kInlinePlaceholder = "{profile_inline}";
constexpr std::string_view kDescriptionLabel = "Description: ";
constexpr std::string_view kNoDescription = "(none)";
constexpr std::string_view kAcquisitionsLabel = "Acquisitions made: ";
// The plain label would itself trip the leakage terms.
constexpr std::string_view kGuardedAcquisitionsLabel = "Companies bought: ";

struct RenderedProfile {
  std::string text;
  // Offset and length of the description value within `text`, if present.
  std::optional<std::pair<std::size_t, std::size_t>> description;
};

RenderedProfile render_fields(const CompanyProfile& p, const RenderOptions& options,
                              std::string_view separator) {
  std::vector<std::string> fields = {
      "Name: " + clean_free_text(p.name, options.leakage_guard),
      "Age: " + format_age(p.age_years),
      "Total raised USD: " + text::format_amount(p.total_raised_usd),
      "Funding rounds: " + std::to_string(p.num_funding_rounds),
      "Distinct investors: " + std::to_string(p.num_investors),
      std::string(options.leakage_guard ? kGuardedAcquisitionsLabel : kAcquisitionsLabel) +
          std::to_string(p.num_acquisitions_made),
      "Executives: " + std::to_string(p.num_executives),
  };
  RenderedProfile out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.text += separator;
    out.text += fields[i];
  }
  if (options.include_description) {
    const auto desc = clean_free_text(p.description, options.leakage_guard);
    out.text += separator;
    out.text += kDescriptionLabel;
    if (desc.empty()) {
      out.text += kNoDescription;
    } else {
      out.description = std::make_pair(out.text.size(), desc.size());
      out.text += desc;
    }
  }
  return out;
}

void check_content(const ChatMessage& m) {
  if (m.content.find(kChatStart) != std::string::npos ||
      m.content.find(kChatEnd) != std::string::npos) {
    throw DataError(std::string("message content for role ") + std::string(role_name(m.role)) +
                    " contains a chat delimiter");
  }
}

std::string_view funding_phrase(double raised) {
  if (raised >= kStrongFundingUsd) return "strong funding";
  if (raised >= kModerateFundingUsd) return "moderate funding";
  if (raised > 0.0) return "limited funding";
  return "no recorded funding";
}

std::string_view investor_phrase(std::int64_t n) {
  if (n >= kManyInvestors) return "a broad investor base";
  if (n >= 1) return "a small investor base";
  return "no recorded investors";
}

std::string_view team_phrase(std::int64_t n) {
  if (n >= kLargeExecutiveTeam) return "a large executive team";
  if (n >= 1) return "a small executive team";
  return "a minimal executive team";
}

}  // namespace

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kSystem:
      return "system";
    case Role::kUser:
      return "user";
    case Role::kAssistant:
      return "assistant";
  }
  return "user";
}

Role role_from_name(std::string_view name) {
  if (name == "system") return Role::kSystem;
  if (name == "user") return Role::kUser;
  if (name == "assistant") return Role::kAssistant;
  throw DataError("unknown chat role '" + std::string(name) + "'");
}

std::string_view variant_name(PromptVariant v) {
  switch (v) {
    case PromptVariant::kV1:
      return "V1";
    case PromptVariant::kV2:
      return "V2";
    case PromptVariant::kV3:
      return "V3";
    case PromptVariant::kV4:
      return "V4";
  }
  return "V4";
}

PromptVariant variant_from_name(std::string_view name) {
  const auto lowered = text::to_lower_ascii(text::trim(name));
  if (lowered == "v1") return PromptVariant::kV1;
  if (lowered == "v2") return PromptVariant::kV2;
  if (lowered == "v3") return PromptVariant::kV3;
  if (lowered == "v4") return PromptVariant::kV4;
  throw UsageError("unknown prompt variant '" + std::string(name) + "'");
}

VariantFeatures variant_features(PromptVariant v) {
  const int level = static_cast<int>(v);
  return VariantFeatures{level >= 2, level >= 3, level >= 4, level >= 4};
}

std::string_view mode_name(PromptMode m) {
  return m == PromptMode::kSft ? "sft" : "inference";
}

PromptMode mode_from_name(std::string_view name) {
  if (name == "sft") return PromptMode::kSft;
  if (name == "inference") return PromptMode::kInference;
  throw UsageError("unknown prompt mode '" + std::string(name) + "'");
}

std::string clean_free_text(std::string_view s, bool leakage_guard) {
  std::string out = text::strip_ci(s, {std::string(kChatStart), std::string(kChatEnd)});
  if (leakage_guard) out = text::strip_ci(out, kLeakageTerms);
  return text::collapse_whitespace(out);
}

std::string format_age(double age_years) {
  if (age_years == kAgeUnknown) return "unknown";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f years", age_years);
  return buf;
}

std::string render_profile_block(const CompanyProfile& profile, const RenderOptions& options) {
  return render_fields(profile, options, "\n").text;
}

std::string template_justification(const CompanyProfile& p) {
  std::string out = p.success ? "The profile supports success with "
                              : "The profile suggests limited prospects given ";
  out += funding_phrase(p.total_raised_usd);
  out += ", ";
  out += investor_phrase(p.num_investors);
  out += " and ";
  out += team_phrase(p.num_executives);
  out += ".";
  return out;
}

std::string target_text(int label, std::string_view justification) {
  std::string out = "Prediction: ";
  out += label ? kPositiveKeyword : kNegativeKeyword;
  out += "\nJustification: ";
  out += justification;
  return out;
}

SftRecord render_prompt(const CompanyProfile& profile, PromptVariant variant, PromptMode mode,
                        const std::vector<SftRecord>& exemplars, const RenderOptions& options) {
  const int level = static_cast<int>(variant);
  if (level < 1 || level > 4) throw UsageError("unknown prompt variant");

  std::string_view tmpl = builtin_template(variant);
  if (auto it = options.templates.find(variant); it != options.templates.end()) tmpl = it->second;

  const bool structured = variant_features(variant).structured_profile;
  const auto placeholder = structured ? kProfilePlaceholder : kInlinePlaceholder;
  const auto at = tmpl.find(placeholder);
  if (at == std::string_view::npos) {
    throw UsageError("template for " + std::string(variant_name(variant)) + " lacks " +
                     std::string(placeholder));
  }
  const auto rendered = render_fields(profile, options, structured ? "\n" : "; ");

  SftRecord rec;
  for (const auto& ex : exemplars) {
    const auto& msgs = ex.chat.messages;
    if (msgs.empty() || msgs.back().role != Role::kAssistant) {
      throw UsageError("few-shot exemplars must be completed SFT records");
    }
    for (const auto& m : msgs) {
      if (m.role != Role::kSystem) rec.chat.messages.push_back(m);
    }
  }

  ChatMessage user{Role::kUser, std::string(tmpl.substr(0, at))};
  const auto profile_offset = user.content.size();
  user.content += rendered.text;
  user.content += tmpl.substr(at + placeholder.size());
  if (rendered.description) {
    rec.chat.description = DescriptionSpan{rec.chat.messages.size(),
                                           profile_offset + rendered.description->first,
                                           rendered.description->second};
  }
  rec.chat.messages.push_back(std::move(user));

  rec.target_label = profile.success;
  rec.target_justification = template_justification(profile);
  if (mode == PromptMode::kSft) {
    rec.chat.messages.push_back(
        {Role::kAssistant, target_text(rec.target_label, rec.target_justification)});
  }
  rec.chat.metadata.org_id = profile.org_id;
  rec.chat.metadata.variant = variant;
  rec.chat.metadata.mode = mode;
  for (const auto& m : rec.chat.messages) check_content(m);
  return rec;
}

std::string serialize_chat(const std::vector<ChatMessage>& messages) {
  std::string out;
  for (const auto& m : messages) {
    check_content(m);
    out += kChatStart;
    out += role_name(m.role);
    out += '\n';
    out += m.content;
    out += kChatEnd;
    out += '\n';
  }
  return out;
}

std::string serialize_chat(const ChatRecord& record) { return serialize_chat(record.messages); }

std::vector<ChatMessage> parse_chat(std::string_view text) {
  std::vector<ChatMessage> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.substr(i, kChatStart.size()) != kChatStart) {
      throw DataError("chat text: expected start marker at byte " + std::to_string(i));
    }
    i += kChatStart.size();
    const auto nl = text.find('\n', i);
    if (nl == std::string_view::npos) throw DataError("chat text: missing role line");
    ChatMessage m;
    m.role = role_from_name(text.substr(i, nl - i));
    i = nl + 1;
    const auto end = text.find(kChatEnd, i);
    if (end == std::string_view::npos) throw DataError("chat text: missing end marker");
    m.content = std::string(text.substr(i, end - i));
    if (m.content.find(kChatStart) != std::string::npos) {
      throw DataError("chat text: nested start marker");
    }
    i = end + kChatEnd.size();
    if (i >= text.size() || text[i] != '\n') throw DataError("chat text: missing newline after end marker");
    ++i;
    out.push_back(std::move(m));
  }
  return out;
}

SftRecord enforce_budget(const SftRecord& record, std::size_t max_tokens,
                         const TokenCounter& token_counter) {
  auto count = [&](const SftRecord& r) { return token_counter(serialize_chat(r.chat)); };
  if (count(record) <= max_tokens) return record;
  if (!record.chat.description) {
    throw DataError("record " + record.chat.metadata.org_id + " exceeds the " +
                    std::to_string(max_tokens) + "-token budget and has no description to cut");
  }
  const auto span = *record.chat.description;
  const auto& content = record.chat.messages.at(span.message).content;
  const std::string desc = content.substr(span.offset, span.length);
  const auto tokens = default_token_spans(desc);

  // Keep the first `keep` description tokens followed by the ellipsis.
  auto build = [&](std::size_t keep) {
    SftRecord r = record;
    std::string kept = keep == 0 ? std::string() : desc.substr(0, tokens[keep - 1].second);
    kept += kEllipsis;
    r.chat.messages[span.message].content =
        content.substr(0, span.offset) + kept + content.substr(span.offset + span.length);
    r.chat.description->length = kept.size();
    return r;
  };

  SftRecord best = build(0);
  if (count(best) > max_tokens) {
    throw DataError("record " + record.chat.metadata.org_id + " exceeds the " +
                    std::to_string(max_tokens) +
                    "-token budget even with an empty description");
  }
  // Largest prefix that fits; token count grows monotonically with `keep`.
  std::size_t lo = 0;
  std::size_t hi = tokens.empty() ? 0 : tokens.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    SftRecord candidate = build(mid);
    if (count(candidate) <= max_tokens) {
      lo = mid;
      best = std::move(candidate);
    } else {
      hi = mid - 1;
    }
  }
  return lo == 0 ? build(0) : best;
}

std::vector<SftRecord> sample_fewshot(const std::vector<SftRecord>& records, std::size_t k,
                                      std::uint64_t seed) {
  if (k > records.size()) {
    throw DataError("few-shot k=" + std::to_string(k) + " exceeds corpus size " +
                    std::to_string(records.size()));
  }
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (records[i].target_label ? pos : neg).push_back(i);
  }
  // The odd extra record goes to the larger class (positives on a tie).
  std::size_t want_pos = k / 2;
  std::size_t want_neg = k / 2;
  if (k % 2) (pos.size() >= neg.size() ? want_pos : want_neg) += 1;
  if (pos.size() < want_pos) {
    throw DataError("few-shot k=" + std::to_string(k) + ": positive class has only " +
                    std::to_string(pos.size()) + " records, need " + std::to_string(want_pos));
  }
  if (neg.size() < want_neg) {
    throw DataError("few-shot k=" + std::to_string(k) + ": negative class has only " +
                    std::to_string(neg.size()) + " records, need " + std::to_string(want_neg));
  }
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  for (auto i : rng.sample_indices(pos.size(), want_pos)) chosen.push_back(pos[i]);
  for (auto i : rng.sample_indices(neg.size(), want_neg)) chosen.push_back(neg[i]);
  std::sort(chosen.begin(), chosen.end());
  std::vector<SftRecord> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(records[i]);
  return out;
}

// ---------------------------------------------------------------------------
// JSONL

nlohmann::ordered_json record_to_json(const SftRecord& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  for (const auto& m : r.chat.messages) {
    messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  j["messages"] = std::move(messages);
  j["label"] = r.target_label;
  j["justification"] = r.target_justification;
  j["org_id"] = r.chat.metadata.org_id;
  j["variant"] = variant_name(r.chat.metadata.variant);
  j["mode"] = mode_name(r.chat.metadata.mode);
  j["split"] = r.chat.metadata.split;
  if (r.chat.description) {
    j["description_span"] = {{"message", r.chat.description->message},
                             {"offset", r.chat.description->offset},
                             {"length", r.chat.description->length}};
  }
  return j;
}

SftRecord record_from_json(const nlohmann::ordered_json& j) {
  try {
    SftRecord r;
    for (const auto& m : j.at("messages")) {
      r.chat.messages.push_back(
          {role_from_name(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
    }
    r.target_label = j.at("label").get<int>();
    r.target_justification = j.at("justification").get<std::string>();
    r.chat.metadata.org_id = j.at("org_id").get<std::string>();
    r.chat.metadata.variant = variant_from_name(j.at("variant").get<std::string>());
    r.chat.metadata.mode = j.contains("mode") ? mode_from_name(j.at("mode").get<std::string>())
                           : (!r.chat.messages.empty() &&
                              r.chat.messages.back().role == Role::kAssistant)
                               ? PromptMode::kSft
                               : PromptMode::kInference;
    if (j.contains("split")) r.chat.metadata.split = j.at("split").get<std::string>();
    if (j.contains("description_span")) {
      const auto& s = j.at("description_span");
      r.chat.description = DescriptionSpan{s.at("message").get<std::size_t>(),
                                           s.at("offset").get<std::size_t>(),
                                           s.at("length").get<std::size_t>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed prompt record: ") + e.what());
  }
}

std::size_t emit_jsonl(const std::vector<SftRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
  return records.size();
}

std::vector<SftRecord> read_records_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("missing input " + path.string());
  std::vector<SftRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training manifest

nlohmann::ordered_json training_manifest(const std::map<std::string, std::string>& overrides) {
  nlohmann::ordered_json m;
  m["epochs"] = 5;
  m["optimizer"] = "adamw";
  m["lr_scheduler"] = "cosine";
  m["learning_rate"] = 5e-4;
  m["warmup_steps"] = 20;
  m["weight_decay"] = 0.01;
  m["per_device_batch_size"] = 1;
  m["gradient_accumulation_steps"] = 2;
  m["effective_batch_size"] = 2;
  m["precision"] = "bf16";
  m["quantization"] = "nf4-4bit";
  m["lora"] = {{"rank", 16},
               {"alpha", 16},
               {"dropout", 0.1},
               {"target_modules",
                {{"qwen", {"q_proj", "v_proj"}},
                 {"llama", {"q_proj", "v_proj"}},
                 {"gpt2", {"c_attn"}}}}};
  m["max_length"] = 256;
  m["pad_token"] = "eos";
  m["chat_markers"] = {kChatStart, kChatEnd};
  m["lora_rank_sweep"] = {8, 16, 32, 64, 128};

  for (const auto& [key, raw] : overrides) {
    std::string pointer = "/" + key;
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    const nlohmann::ordered_json::json_pointer ptr(pointer);
    if (!m.contains(ptr)) throw UsageError("unknown manifest key '" + key + "'");
    nlohmann::ordered_json value;
    try {
      value = nlohmann::ordered_json::parse(raw);
    } catch (const nlohmann::json::exception&) {
      value = raw;
    }
    m[ptr] = value;
  }
  if (m["per_device_batch_size"].is_number_integer() &&
      m["gradient_accumulation_steps"].is_number_integer()) {
    m["effective_batch_size"] = m["per_device_batch_size"].get<std::int64_t>() *
                                m["gradient_accumulation_steps"].get<std::int64_t>();
  }
  return m;
}

std::string emit_training_manifest(const std::map<std::string, std::string>& overrides) {
  return training_manifest(overrides).dump(2) + "\n";
}

}  // namespace exitbench
