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

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace exitbench {

// Local OpenAI-compatible stand-in used by tests and the CLI end-to-end run.
struct MockOptions {
  enum class Mode { kOracle, kConstant };
  Mode mode = Mode::kConstant;
  // Oracle mode: company name -> label, matched against the last `Name:` in
  // the final user message. Unknown names get `constant_label`.
  std::map<std::string, int> labels;
  int constant_label = 1;
  std::string justification = "The profile features support this outcome.";
  // Statuses returned for the first requests, in order, before normal service.
  std::vector<int> scripted_statuses;
  // Requests naming one of these companies always fail with `failure_status`.
  std::set<std::string> failing_names;
  int failure_status = 500;
  // Uniform per-request latency in [min, max] milliseconds.
  int min_latency_ms = 0;
  int max_latency_ms = 0;
  std::uint64_t seed = 1;
};

class MockEndpoint {
 public:
  explicit MockEndpoint(MockOptions options);
  ~MockEndpoint();
  MockEndpoint(const MockEndpoint&) = delete;
  MockEndpoint& operator=(const MockEndpoint&) = delete;

  // Binds an ephemeral port (or `port` when non-zero) and serves in the
  // background until stop().
  void start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  // Blocks serving on the calling thread.
  void serve_forever(const std::string& host, int port);

  int port() const noexcept { return port_; }
  std::string base_url() const;  // http://host:port/v1

  std::size_t requests() const noexcept { return requests_.load(); }
  int max_observed_in_flight() const noexcept { return max_in_flight_.load(); }

 private:
  void install_routes();
  std::string respond_chat(const std::string& body, int& status);

  MockOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::mutex mutex_;  // script position and latency RNG
  std::size_t script_pos_ = 0;
  std::uint64_t rng_state_ = 0;
};

// Company name on the last `Name:` line of `text`, or empty.
std::string extract_company_name(const std::string& text);

// Deterministic bag-of-words embedding (one hashed vector per word), the
// payload the mock's /embed route serves.
std::string mock_embedding_payload(const std::string& text, int dimensions = 16);

}  // namespace exitbench
