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
#include <chrono>
#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "exitbench/http_transport.hpp"

namespace testsupport {

// Replays queued responses, then falls back to `handler` (if set) or 200 "{}".
class ScriptedTransport : public exitbench::HttpTransport {
 public:
  using Handler = std::function<exitbench::HttpResponse(const std::string& path, const std::string& body)>;

  void push(int status, std::string body = "", std::string error = "") {
    std::lock_guard lock(mutex_);
    script_.push_back({status, std::move(body), std::move(error)});
  }
  void set_handler(Handler h) { handler_ = std::move(h); }
  void set_delay(std::chrono::milliseconds d) { delay_ = d; }

  exitbench::HttpResponse post_json(const std::string& path, const std::string& body,
                                    const exitbench::Headers& headers,
                                    std::chrono::milliseconds) override {
    const int now = ++in_flight_;
    int seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }
    exitbench::HttpResponse r;
    bool scripted = false;
    {
      std::lock_guard lock(mutex_);
      calls_.push_back({path, body, headers});
      if (!script_.empty()) {
        r = script_.front();
        script_.pop_front();
        scripted = true;
      }
    }
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    if (!scripted) r = handler_ ? handler_(path, body) : exitbench::HttpResponse{200, "{}", ""};
    --in_flight_;
    return r;
  }

  struct Call {
    std::string path;
    std::string body;
    exitbench::Headers headers;
  };
  std::vector<Call> calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }
  int max_in_flight() const { return max_in_flight_.load(); }

 private:
  mutable std::mutex mutex_;
  std::deque<exitbench::HttpResponse> script_;
  std::vector<Call> calls_;
  Handler handler_;
  std::chrono::milliseconds delay_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

// Records requested sleeps instead of sleeping.
struct SleepLog {
  std::shared_ptr<std::vector<std::chrono::milliseconds>> sleeps =
      std::make_shared<std::vector<std::chrono::milliseconds>>();
  exitbench::Sleeper sleeper() const {
    auto s = sleeps;
    return [s](std::chrono::milliseconds d) { s->push_back(d); };
  }
};

}  // namespace testsupport
