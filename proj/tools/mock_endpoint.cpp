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

// Local OpenAI-compatible mock used for offline end-to-end runs.

#include <fstream>
#include <iostream>
#include <thread>
#include <string>

#include <CLI11.hpp>

#include "exitbench/error.hpp"
#include "exitbench/feature_engine.hpp"
#include "exitbench/mock_endpoint.hpp"

int main(int argc, char** argv) {
  CLI::App app{"exitbench-mock: local chat-completions endpoint for tests"};
  std::string host = "127.0.0.1";
  int port = 0;
  std::string port_file;
  std::string mode = "constant";
  std::string profiles;
  exitbench::MockOptions options;
  int fail_first = 0;
  app.add_option("--host", host, "Bind address")->capture_default_str();
  app.add_option("--port", port, "Port; 0 picks a free one")->capture_default_str();
  app.add_option("--port-file", port_file, "Write the bound port here once listening");
  app.add_option("--mode", mode, "oracle | constant")->capture_default_str();
  app.add_option("--profiles", profiles, "Profiles JSONL giving the oracle's name -> label table");
  app.add_option("--label", options.constant_label, "Label for constant mode (0 or 1)")
      ->capture_default_str();
  app.add_option("--fail-first", fail_first, "Answer the first N requests with 503")
      ->capture_default_str();
  app.add_option("--latency-min", options.min_latency_ms, "Minimum latency in ms")->capture_default_str();
  app.add_option("--latency-max", options.max_latency_ms, "Maximum latency in ms")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    if (mode == "oracle") {
      options.mode = exitbench::MockOptions::Mode::kOracle;
      if (profiles.empty()) throw exitbench::UsageError("oracle mode needs --profiles");
      for (const auto& p : exitbench::read_profiles_jsonl(profiles)) options.labels[p.name] = p.success;
    } else if (mode != "constant") {
      throw exitbench::UsageError("unknown mode '" + mode + "'");
    }
    options.scripted_statuses.assign(static_cast<std::size_t>(std::max(fail_first, 0)), 503);

    exitbench::MockEndpoint server(options);
    server.start(host, port);
    if (!port_file.empty()) {
      std::ofstream(port_file) << server.port() << "\n";
    }
    std::cerr << "mock endpoint listening on " << server.base_url() << "\n";
    // Serve until killed.
    for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
  } catch (const exitbench::Error& e) {
    std::cerr << "exitbench-mock: " << e.what() << "\n";
    return exitbench::exit_code_for(e.kind());
  }
}
