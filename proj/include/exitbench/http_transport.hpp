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
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "exitbench/error.hpp"
#include "exitbench/rng.hpp"

namespace exitbench {

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;  // 0: no HTTP response (connection failure, timeout)
  std::string body;
  std::string error;
};

// Minimal POST-JSON interface; the seam tests replace with scripted fakes.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post_json(const std::string& path, const std::string& body,
                                 const Headers& headers, std::chrono::milliseconds timeout) = 0;
};

// `scheme://host[:port][/prefix]` split into its origin and path prefix.
struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path_prefix;  // no trailing slash; may be empty
};
ParsedUrl parse_base_url(const std::string& base_url);

// cpp-httplib backed transport for http:// and https:// origins.
std::shared_ptr<HttpTransport> make_http_transport(const std::string& origin);

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  std::chrono::milliseconds max_delay{60000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

// Full jitter: uniform in [0, min(max_delay, base_delay * factor^retry)].
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry, Rng& rng);

bool is_retryable_status(int status);

struct AttemptRecord {
  int attempt = 0;  // 1-based
  int status = 0;
  std::string error;
  std::chrono::milliseconds backoff{0};  // sleep before the next attempt
};

// TransportError that keeps the per-attempt log.
class RetryError : public TransportError {
 public:
  RetryError(const std::string& what, std::vector<AttemptRecord> attempts)
      : TransportError(what), attempts_(std::move(attempts)) {}
  const std::vector<AttemptRecord>& attempts() const noexcept { return attempts_; }

 private:
  std::vector<AttemptRecord> attempts_;
};

struct PostOutcome {
  HttpResponse response;
  std::vector<AttemptRecord> attempts;
};

// POSTs with retries on connection failures, timeouts, 5xx and 429.
// Throws RetryError when retries are exhausted or the endpoint answers with
// another 4xx.
class RetryingPoster {
 public:
  RetryingPoster(std::shared_ptr<HttpTransport> transport, RetryPolicy policy,
                 Sleeper sleeper = real_sleeper(), std::uint64_t jitter_seed = 0x5eed);

  PostOutcome post(const std::string& path, const std::string& body, const Headers& headers,
                   std::chrono::milliseconds timeout) const;

  const RetryPolicy& policy() const noexcept { return policy_; }

 private:
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  mutable std::mutex rng_mutex_;
  mutable Rng rng_;
};

std::string describe_attempts(const std::vector<AttemptRecord>& attempts);

}  // namespace exitbench
