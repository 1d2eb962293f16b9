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

#include "exitbench/mock_endpoint.hpp"

#include <chrono>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "exitbench/error.hpp"
#include "exitbench/text.hpp"

namespace exitbench {
namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class InFlightGuard {
 public:
  InFlightGuard(std::atomic<int>& in_flight, std::atomic<int>& max_seen) : in_flight_(in_flight) {
    const int now = ++in_flight_;
    int prev = max_seen.load();
    while (now > prev && !max_seen.compare_exchange_weak(prev, now)) {
    }
  }
  ~InFlightGuard() { --in_flight_; }

 private:
  std::atomic<int>& in_flight_;
};

}  // namespace

std::string extract_company_name(const std::string& text) {
  const std::string key = "Name: ";
  // Only a line-leading `Name:` counts, so description text cannot spoof it.
  std::size_t pos = text.rfind(key);
  while (pos != std::string::npos && pos > 0 && text[pos - 1] != '\n') {
    pos = text.rfind(key, pos - 1);
  }
  if (pos == std::string::npos) return {};
  const std::size_t start = pos + key.size();
  const std::size_t end = text.find_first_of(";\n", start);
  return std::string(text::trim(text.substr(start, end == std::string::npos ? end : end - start)));
}

std::string mock_embedding_payload(const std::string& input, int dimensions) {
  auto tokens = text::words(input);
  if (tokens.empty()) tokens.push_back(input);
  nlohmann::json vectors = nlohmann::json::array();
  for (const auto& tok : tokens) {
    std::uint64_t state = fnv1a(tok);
    nlohmann::json v = nlohmann::json::array();
    for (int d = 0; d < dimensions; ++d) {
      // Uniform in [-1, 1); the first coordinate is kept positive so no
      // vector can be zero.
      const double u = static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
      v.push_back(d == 0 ? 0.5 + 0.5 * u : 2.0 * u - 1.0);
    }
    vectors.push_back(std::move(v));
  }
  return nlohmann::json{{"tokens", tokens}, {"vectors", vectors}}.dump();
}

MockEndpoint::MockEndpoint(MockOptions options)
    : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  rng_state_ = options_.seed;
  server_->new_task_queue = [] { return new httplib::ThreadPool(16); };
  install_routes();
}

MockEndpoint::~MockEndpoint() { stop(); }

void MockEndpoint::install_routes() {
  server_->Post(R"(.*/chat/completions)", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
    ++requests_;
    InFlightGuard guard(in_flight_, max_in_flight_);
    int status = 200;
    const std::string body = respond_chat(req.body, status);
    res.status = status;
    res.set_content(body, "application/json");
  });
  server_->Post(R"(.*/embed)", [](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto j = nlohmann::json::parse(req.body);
      res.set_content(mock_embedding_payload(j.at("text").get<std::string>()), "application/json");
    } catch (const nlohmann::json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":"bad request"})", "application/json");
    }
  });
}

std::string MockEndpoint::respond_chat(const std::string& body, int& status) {
  int delay_ms = 0;
  int scripted = 0;
  {
    std::lock_guard lock(mutex_);
    if (script_pos_ < options_.scripted_statuses.size()) {
      scripted = options_.scripted_statuses[script_pos_++];
    }
    if (options_.max_latency_ms > options_.min_latency_ms) {
      const auto span = static_cast<std::uint64_t>(options_.max_latency_ms - options_.min_latency_ms + 1);
      delay_ms = options_.min_latency_ms + static_cast<int>(splitmix(rng_state_) % span);
    } else {
      delay_ms = options_.min_latency_ms;
    }
  }
  if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
  if (scripted != 0 && scripted != 200) {
    status = scripted;
    return R"({"error":"scripted failure"})";
  }

  std::string user_text;
  try {
    const auto j = nlohmann::json::parse(body);
    for (const auto& m : j.at("messages")) {
      if (m.at("role") == "user") user_text = m.at("content").get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
    status = 400;
    return R"({"error":"bad request"})";
  }
  const std::string name = extract_company_name(user_text);
  if (options_.failing_names.count(name)) {
    status = options_.failure_status;
    return R"({"error":"injected failure"})";
  }
  int label = options_.constant_label;
  if (options_.mode == MockOptions::Mode::kOracle) {
    const auto it = options_.labels.find(name);
    if (it != options_.labels.end()) label = it->second;
  }
  const std::string content = std::string("Prediction: ") +
                              (label ? "Successful" : "Unsuccessful") +
                              "\nJustification: " + options_.justification;
  nlohmann::json reply = {
      {"id", "mock-" + std::to_string(requests_.load())},
      {"object", "chat.completion"},
      {"choices",
       {{{"index", 0},
         {"message", {{"role", "assistant"}, {"content", content}}},
         {"finish_reason", "stop"}}}}};
  return reply.dump();
}

void MockEndpoint::start(const std::string& host, int port) {
  if (thread_.joinable()) throw UsageError("mock endpoint already running");
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw IoError("mock endpoint could not bind " + host);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void MockEndpoint::serve_forever(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) throw IoError("mock endpoint could not listen on port " + std::to_string(port));
}

void MockEndpoint::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockEndpoint::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_) + "/v1";
}

}  // namespace exitbench
