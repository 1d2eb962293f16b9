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

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "exitbench/bertscore.hpp"
#include "exitbench/http_transport.hpp"
#include "exitbench/metrics.hpp"
#include "exitbench/prompt_compiler.hpp"

namespace exitbench {

struct EndpointConfig {
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string model = "default";
  std::string api_key_env = "OPENAI_API_KEY";  // variable name, never the key
  double temperature = 0.0;
  int max_completion_tokens = 128;
  double timeout_seconds = 60.0;
  int max_retries = 3;
  int max_in_flight = 4;

  void validate() const;
};

struct ChatCompletion {
  std::string content;
  std::vector<AttemptRecord> attempts;
};

// OpenAI-compatible `POST {base_url}/chat/completions`. Thread-safe.
class ChatClient {
 public:
  // Uses a cpp-httplib transport for the configured URL when `transport` is
  // null.
  explicit ChatClient(EndpointConfig config, std::shared_ptr<HttpTransport> transport = nullptr,
                      std::optional<RetryPolicy> retry = std::nullopt,
                      Sleeper sleeper = real_sleeper());

  // Throws RetryError on transport failure, ProtocolError on a malformed body.
  ChatCompletion complete(const std::vector<ChatMessage>& messages) const;

  nlohmann::ordered_json request_body(const std::vector<ChatMessage>& messages) const;
  const EndpointConfig& config() const noexcept { return config_; }

 private:
  EndpointConfig config_;
  std::string path_;
  RetryingPoster poster_;
};

enum class ParseStatus { kParsed, kFallbackParsed, kUnparseable };
std::string_view parse_status_name(ParseStatus s);
ParseStatus parse_status_from_name(std::string_view s);

struct ParsedResponse {
  std::optional<int> label;
  std::optional<std::string> justification;
  std::string raw;
  ParseStatus status = ParseStatus::kUnparseable;
  friend bool operator==(const ParsedResponse&, const ParsedResponse&) = default;
};

// Primary grammar: `prediction:` then successful/unsuccessful (or yes/no,
// 1/0), then an optional `justification:` taking the rest. Fallback: the
// first standalone `successful` / `unsuccessful` anywhere. Pure.
ParsedResponse parse_response(std::string_view raw);

struct EvalOutcome {
  std::string org_id;
  int true_label = 0;
  ParsedResponse response;
  int correct = 0;
  double latency_ms = 0.0;
  int attempts = 0;
  std::string error;  // transport or protocol failure, if any
  std::string reference_justification;
  std::optional<BertScoreResult> justification_score;
};

struct BertScoreSummary {
  std::size_t scored = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalRun {
  std::vector<EvalOutcome> outcomes;  // input order
  ClassificationReport report;
  std::size_t parsed = 0;
  std::size_t fallback_parsed = 0;
  std::size_t unparseable = 0;  // includes transport failures
  std::size_t transport_failures = 0;
  std::optional<BertScoreSummary> justification;

  std::size_t parse_failures() const noexcept { return unparseable; }
  nlohmann::ordered_json summary_json() const;
};

struct EvalOptions {
  int max_in_flight = 4;
  // Receives each outcome's audit line in input order as soon as all
  // earlier records are done.
  std::function<void(const nlohmann::ordered_json&)> audit_sink;
  // Scores parsed justifications against the reference one when set.
  EmbeddingCache* embeddings = nullptr;
};

// Transport errors mark a record unparseable and incorrect; they never abort.
EvalRun run_eval(const ChatClient& client, const std::vector<SftRecord>& records,
                 const EvalOptions& options = {});

// One audit line: {org_id, label, request, raw, parsed, latency_ms, ...}.
nlohmann::ordered_json audit_line(const EvalOutcome& outcome, const nlohmann::ordered_json& request);

// Rebuilds outcomes from an audit log and re-parses every raw completion.
EvalRun rescore_audit(const std::vector<nlohmann::ordered_json>& audit_lines,
                      EmbeddingCache* embeddings = nullptr);
std::vector<nlohmann::ordered_json> read_audit_log(const std::filesystem::path& path);

// Aggregation shared by run_eval and rescore_audit.
EvalRun summarize(std::vector<EvalOutcome> outcomes);

}  // namespace exitbench
