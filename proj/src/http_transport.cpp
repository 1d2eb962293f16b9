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

#include "exitbench/http_transport.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "exitbench/error.hpp"

namespace exitbench {
namespace {

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::string origin) : origin_(std::move(origin)) {}

  HttpResponse post_json(const std::string& path, const std::string& body,
                         const Headers& headers, std::chrono::milliseconds timeout) override {
    // One client per request keeps concurrent callers independent.
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    HttpResponse out;
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }

 private:
  std::string origin_;
};

}  // namespace

ParsedUrl parse_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw UsageError("endpoint URL must start with http:// or https://: " + base_url);
  }
  const auto scheme = base_url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw UsageError("unsupported URL scheme '" + scheme + "'");
  }
  const auto host_start = scheme_end + 3;
  const auto slash = base_url.find('/', host_start);
  ParsedUrl out;
  out.origin = base_url.substr(0, slash);
  if (out.origin.size() <= host_start) throw UsageError("endpoint URL lacks a host: " + base_url);
  if (slash != std::string::npos) {
    out.path_prefix = base_url.substr(slash);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  }
  return out;
}

std::shared_ptr<HttpTransport> make_http_transport(const std::string& origin) {
  return std::make_shared<HttplibTransport>(origin);
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry, Rng& rng) {
  const double cap = std::min(static_cast<double>(policy.max_delay.count()),
                              static_cast<double>(policy.base_delay.count()) *
                                  std::pow(policy.factor, retry));
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::floor(rng.uniform() * cap)));
}

bool is_retryable_status(int status) { return status == 0 || status == 429 || status >= 500; }

RetryingPoster::RetryingPoster(std::shared_ptr<HttpTransport> transport, RetryPolicy policy,
                               Sleeper sleeper, std::uint64_t jitter_seed)
    : transport_(std::move(transport)),
      policy_(policy),
      sleeper_(std::move(sleeper)),
      rng_(jitter_seed) {
  if (!transport_) throw UsageError("no HTTP transport configured");
  if (policy_.max_retries < 0) throw UsageError("max_retries must be >= 0");
}

PostOutcome RetryingPoster::post(const std::string& path, const std::string& body,
                                 const Headers& headers, std::chrono::milliseconds timeout) const {
  PostOutcome out;
  for (int attempt = 1;; ++attempt) {
    HttpResponse res = transport_->post_json(path, body, headers, timeout);
    AttemptRecord rec{attempt, res.status, res.error, std::chrono::milliseconds{0}};
    if (res.status >= 200 && res.status < 300) {
      out.attempts.push_back(rec);
      out.response = std::move(res);
      return out;
    }
    if (rec.error.empty() && res.status != 0) {
      rec.error = "HTTP " + std::to_string(res.status);
    }
    if (!is_retryable_status(res.status)) {
      out.attempts.push_back(rec);
      throw RetryError("non-retryable response: " + describe_attempts(out.attempts),
                       out.attempts);
    }
    if (attempt > policy_.max_retries) {
      out.attempts.push_back(rec);
      throw RetryError("retries exhausted after " + std::to_string(attempt) +
                           " attempts: " + describe_attempts(out.attempts),
                       out.attempts);
    }
    {
      std::lock_guard lock(rng_mutex_);
      rec.backoff = backoff_delay(policy_, attempt - 1, rng_);
    }
    out.attempts.push_back(rec);
    sleeper_(rec.backoff);
  }
}

std::string describe_attempts(const std::vector<AttemptRecord>& attempts) {
  std::string out;
  for (const auto& a : attempts) {
    if (!out.empty()) out += "; ";
    out += "#" + std::to_string(a.attempt) + " " + (a.error.empty() ? "ok" : a.error);
  }
  return out;
}

}  // namespace exitbench
