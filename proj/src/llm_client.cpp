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

#include "exitbench/llm_client.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "exitbench/error.hpp"
#include "exitbench/text.hpp"

namespace exitbench {
namespace {

using ordered_json = nlohmann::ordered_json;

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool standalone_at(std::string_view s, std::size_t pos, std::size_t len) {
  const bool left = pos == 0 || !is_word_char(s[pos - 1]);
  const bool right = pos + len >= s.size() || !is_word_char(s[pos + len]);
  return left && right;
}

std::size_t skip_decoration(std::string_view s, std::size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '*' || s[i] == '_')) ++i;
  return i;
}

// Position just past `keyword` + optional decoration + ':' at or after `from`,
// or npos.
std::size_t find_labelled(std::string_view lower, std::string_view keyword, std::size_t from) {
  for (std::size_t pos = lower.find(keyword, from); pos != std::string_view::npos;
       pos = lower.find(keyword, pos + 1)) {
    if (pos > 0 && is_word_char(lower[pos - 1])) continue;
    std::size_t i = skip_decoration(lower, pos + keyword.size());
    if (i < lower.size() && lower[i] == ':') return i + 1;
  }
  return std::string_view::npos;
}

struct LabelWord {
  std::string_view word;
  int label;
};
constexpr LabelWord kLabelWords[] = {{"unsuccessful", 0}, {"successful", 1}, {"yes", 1},
                                     {"no", 0},           {"1", 1},          {"0", 0}};

std::vector<ChatMessage> request_messages(const ChatRecord& chat) {
  std::vector<ChatMessage> out = chat.messages;
  if (!out.empty() && out.back().role == Role::kAssistant) out.pop_back();
  return out;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void score_justification(EvalOutcome& o, EmbeddingCache* cache) {
  if (!cache || !o.response.justification || o.response.justification->empty() ||
      o.reference_justification.empty()) {
    return;
  }
  o.justification_score = bertscore(cache->fetch(*o.response.justification),
                                    cache->fetch(o.reference_justification));
}

}  // namespace

void EndpointConfig::validate() const {
  if (!(temperature >= 0.0)) throw UsageError("temperature must be >= 0");
  if (max_in_flight < 1) throw UsageError("max_in_flight must be >= 1");
  if (max_retries < 0) throw UsageError("max_retries must be >= 0");
  if (max_completion_tokens < 1) throw UsageError("max_completion_tokens must be >= 1");
  if (!(timeout_seconds > 0.0)) throw UsageError("timeout must be positive");
  if (model.empty()) throw UsageError("model name must not be empty");
  parse_base_url(base_url);
}

ChatClient::ChatClient(EndpointConfig config, std::shared_ptr<HttpTransport> transport,
                       std::optional<RetryPolicy> retry, Sleeper sleeper)
    : config_((config.validate(), std::move(config))),
      path_(parse_base_url(config_.base_url).path_prefix + "/chat/completions"),
      poster_(transport ? std::move(transport)
                        : make_http_transport(parse_base_url(config_.base_url).origin),
              retry.value_or(RetryPolicy{config_.max_retries}), std::move(sleeper)) {}

ordered_json ChatClient::request_body(const std::vector<ChatMessage>& messages) const {
  ordered_json msgs = ordered_json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  return {{"model", config_.model},
          {"messages", std::move(msgs)},
          {"temperature", config_.temperature},
          {"max_tokens", config_.max_completion_tokens}};
}

ChatCompletion ChatClient::complete(const std::vector<ChatMessage>& messages) const {
  if (messages.empty()) throw UsageError("chat request needs at least one message");
  Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace_back("Authorization", std::string("Bearer ") + key);
    }
  }
  const auto timeout = std::chrono::milliseconds(
      static_cast<std::int64_t>(config_.timeout_seconds * 1000.0));
  PostOutcome out = poster_.post(path_, request_body(messages).dump(), headers, timeout);

  ChatCompletion c;
  c.attempts = std::move(out.attempts);
  try {
    const auto j = nlohmann::json::parse(out.response.body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw ProtocolError("message content is not a string");
    c.content = content.get<std::string>();
  } catch (const nlohmann::json::exception& ex) {
    throw ProtocolError(std::string("malformed chat completion response: ") + ex.what());
  }
  return c;
}

std::string_view parse_status_name(ParseStatus s) {
  switch (s) {
    case ParseStatus::kParsed: return "parsed";
    case ParseStatus::kFallbackParsed: return "fallback-parsed";
    case ParseStatus::kUnparseable: return "unparseable";
  }
  return "unparseable";
}

ParseStatus parse_status_from_name(std::string_view s) {
  if (s == "parsed") return ParseStatus::kParsed;
  if (s == "fallback-parsed") return ParseStatus::kFallbackParsed;
  if (s == "unparseable") return ParseStatus::kUnparseable;
  throw DataError("unknown parse status '" + std::string(s) + "'");
}

ParsedResponse parse_response(std::string_view raw) {
  ParsedResponse r;
  r.raw = std::string(raw);
  const std::string lower = text::to_lower_ascii(raw);
  const std::string_view lv = lower;

  for (std::size_t after = find_labelled(lv, "prediction", 0); after != std::string_view::npos;
       after = find_labelled(lv, "prediction", after)) {
    const std::size_t i = skip_decoration(lv, after);
    for (const auto& [word, label] : kLabelWords) {
      if (lv.substr(i, word.size()) != word || !standalone_at(lv, i, word.size())) continue;
      r.label = label;
      r.status = ParseStatus::kParsed;
      const std::size_t j = find_labelled(lv, "justification", i + word.size());
      if (j != std::string_view::npos) {
        const auto rest = text::trim(raw.substr(j));
        if (!rest.empty()) r.justification = std::string(rest);
      }
      return r;
    }
  }

  std::size_t best = std::string_view::npos;
  for (const auto& [word, label] : {kLabelWords[0], kLabelWords[1]}) {
    for (std::size_t pos = lv.find(word); pos != std::string_view::npos;
         pos = lv.find(word, pos + 1)) {
      if (!standalone_at(lv, pos, word.size())) continue;
      if (pos < best) {
        best = pos;
        r.label = label;
      }
      break;
    }
  }
  if (r.label) r.status = ParseStatus::kFallbackParsed;
  return r;
}

ordered_json EvalRun::summary_json() const {
  ordered_json j = report.to_json();
  j["records"] = outcomes.size();
  j["parsed"] = parsed;
  j["fallback_parsed"] = fallback_parsed;
  j["unparseable"] = unparseable;
  j["transport_failures"] = transport_failures;
  if (justification) {
    j["justification_bertscore"] = {{"scored", justification->scored},
                                    {"precision", justification->precision},
                                    {"recall", justification->recall},
                                    {"f1", justification->f1}};
  }
  return j;
}

ordered_json audit_line(const EvalOutcome& o, const ordered_json& request) {
  ordered_json parsed = {{"label", nullptr}, {"justification", nullptr},
                         {"status", parse_status_name(o.response.status)}};
  if (o.response.label) parsed["label"] = *o.response.label;
  if (o.response.justification) parsed["justification"] = *o.response.justification;
  ordered_json j = {{"org_id", o.org_id},
                    {"label", o.true_label},
                    {"request", request},
                    {"raw", o.response.raw},
                    {"parsed", std::move(parsed)},
                    {"correct", o.correct},
                    {"latency_ms", o.latency_ms},
                    {"attempts", o.attempts},
                    {"error", o.error.empty() ? ordered_json(nullptr) : ordered_json(o.error)},
                    {"reference_justification", o.reference_justification}};
  if (o.justification_score) {
    j["bertscore"] = {{"precision", o.justification_score->precision},
                      {"recall", o.justification_score->recall},
                      {"f1", o.justification_score->f1}};
  }
  return j;
}

EvalRun summarize(std::vector<EvalOutcome> outcomes) {
  EvalRun run;
  std::vector<int> preds;
  std::vector<int> labels;
  BertScoreSummary bs;
  for (const auto& o : outcomes) {
    switch (o.response.status) {
      case ParseStatus::kParsed: ++run.parsed; break;
      case ParseStatus::kFallbackParsed: ++run.fallback_parsed; break;
      case ParseStatus::kUnparseable: ++run.unparseable; break;
    }
    if (!o.error.empty()) ++run.transport_failures;
    labels.push_back(o.true_label);
    // Unparseable records must count as wrong whatever the true label is.
    preds.push_back(o.response.label ? *o.response.label : 1 - o.true_label);
    if (o.justification_score) {
      ++bs.scored;
      bs.precision += o.justification_score->precision;
      bs.recall += o.justification_score->recall;
      bs.f1 += o.justification_score->f1;
    }
  }
  if (!outcomes.empty()) run.report = report(confusion(preds, labels));
  if (bs.scored > 0) {
    const double n = static_cast<double>(bs.scored);
    bs.precision /= n;
    bs.recall /= n;
    bs.f1 /= n;
    run.justification = bs;
  }
  run.outcomes = std::move(outcomes);
  return run;
}

EvalRun run_eval(const ChatClient& client, const std::vector<SftRecord>& records,
                 const EvalOptions& options) {
  if (options.max_in_flight < 1) throw UsageError("max_in_flight must be >= 1");
  const std::size_t n = records.size();
  std::vector<EvalOutcome> outcomes(n);
  std::vector<ordered_json> requests(n);
  std::vector<char> done(n, 0);
  std::atomic<std::size_t> next{0};
  std::mutex emit_mutex;
  std::size_t emitted = 0;
  std::exception_ptr sink_error;

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      const SftRecord& rec = records[i];
      EvalOutcome& o = outcomes[i];
      o.org_id = rec.chat.metadata.org_id;
      o.true_label = rec.target_label;
      o.reference_justification = rec.target_justification;
      const auto messages = request_messages(rec.chat);
      requests[i] = client.request_body(messages);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        ChatCompletion c = client.complete(messages);
        o.attempts = static_cast<int>(c.attempts.size());
        o.response = parse_response(c.content);
      } catch (const RetryError& ex) {
        o.attempts = static_cast<int>(ex.attempts().size());
        o.error = ex.what();
      } catch (const Error& ex) {
        o.attempts = std::max(o.attempts, 1);
        o.error = ex.what();
      }
      o.latency_ms = ms_since(t0);
      if (!o.error.empty()) o.response = ParsedResponse{};
      o.correct = o.response.label && *o.response.label == o.true_label ? 1 : 0;
      try {
        score_justification(o, options.embeddings);
      } catch (const Error&) {
        o.justification_score.reset();
      }

      std::lock_guard lock(emit_mutex);
      done[i] = 1;
      while (emitted < n && done[emitted]) {
        if (options.audit_sink && !sink_error) {
          try {
            options.audit_sink(audit_line(outcomes[emitted], requests[emitted]));
          } catch (...) {
            sink_error = std::current_exception();
          }
        }
        ++emitted;
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(options.max_in_flight), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (sink_error) std::rethrow_exception(sink_error);
  return summarize(std::move(outcomes));
}

EvalRun rescore_audit(const std::vector<ordered_json>& audit_lines, EmbeddingCache* embeddings) {
  std::vector<EvalOutcome> outcomes;
  outcomes.reserve(audit_lines.size());
  for (std::size_t i = 0; i < audit_lines.size(); ++i) {
    const auto& j = audit_lines[i];
    EvalOutcome o;
    try {
      o.org_id = j.at("org_id").get<std::string>();
      o.true_label = j.at("label").get<int>();
      o.latency_ms = j.value("latency_ms", 0.0);
      o.attempts = j.value("attempts", 0);
      if (j.contains("error") && j["error"].is_string()) o.error = j["error"].get<std::string>();
      o.reference_justification = j.value("reference_justification", std::string());
      const std::string raw = j.at("raw").get<std::string>();
      o.response = o.error.empty() ? parse_response(raw) : ParsedResponse{};
    } catch (const nlohmann::json::exception& ex) {
      throw DataError("audit line " + std::to_string(i + 1) + ": " + ex.what());
    }
    if (o.true_label != 0 && o.true_label != 1) {
      throw DataError("audit line " + std::to_string(i + 1) + ": label must be 0 or 1");
    }
    o.correct = o.response.label && *o.response.label == o.true_label ? 1 : 0;
    score_justification(o, embeddings);
    outcomes.push_back(std::move(o));
  }
  if (outcomes.empty()) throw DataError("audit log is empty");
  return summarize(std::move(outcomes));
}

std::vector<ordered_json> read_audit_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("audit log not found: " + path.string());
  std::vector<ordered_json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ordered_json::parse(line));
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace exitbench
