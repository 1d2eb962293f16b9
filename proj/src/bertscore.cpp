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

#include "exitbench/bertscore.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace exitbench {

void TokenEmbeddings::validate() const {
  if (tokens.empty()) throw DataError("embedding has no tokens");
  if (static_cast<std::size_t>(vectors.rows()) != tokens.size()) {
    throw DataError("embedding has " + std::to_string(vectors.rows()) + " vectors for " +
                    std::to_string(tokens.size()) + " tokens");
  }
  if (vectors.cols() == 0) throw DataError("embedding vectors are empty");
  if (!vectors.allFinite()) throw DataError("embedding contains non-finite values");
  if (idf && static_cast<std::size_t>(idf->size()) != tokens.size()) {
    throw DataError("idf weight count does not match token count");
  }
}

BertScoreResult bertscore(const TokenEmbeddings& candidate, const TokenEmbeddings& reference) {
  candidate.validate();
  reference.validate();
  const Eigen::MatrixXd sim = cosine_matrix(candidate.vectors, reference.vectors);
  if (candidate.idf && reference.idf) return greedy_match(sim, *candidate.idf, *reference.idf);
  return greedy_match(sim);
}

std::map<std::string, double> compute_idf(const std::vector<std::vector<std::string>>& documents) {
  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    for (const auto& tok : std::set<std::string>(doc.begin(), doc.end())) ++df[tok];
  }
  const double n = static_cast<double>(documents.size());
  std::map<std::string, double> out;
  for (const auto& [tok, count] : df) {
    out[tok] = std::log((n + 1.0) / (static_cast<double>(count) + 1.0));
  }
  return out;
}

void attach_idf(TokenEmbeddings& e, const std::map<std::string, double>& idf,
                std::size_t n_documents) {
  const double unseen = std::log(static_cast<double>(n_documents) + 1.0);
  Eigen::VectorXd w(static_cast<Eigen::Index>(e.tokens.size()));
  for (std::size_t i = 0; i < e.tokens.size(); ++i) {
    const auto it = idf.find(e.tokens[i]);
    w(static_cast<Eigen::Index>(i)) = it == idf.end() ? unseen : it->second;
  }
  e.idf = std::move(w);
}

TokenEmbeddings embeddings_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("tokens") || !j.contains("vectors") ||
      !j["tokens"].is_array() || !j["vectors"].is_array()) {
    throw ProtocolError("embedding payload needs 'tokens' and 'vectors' arrays");
  }
  TokenEmbeddings e;
  try {
    e.tokens = j["tokens"].get<std::vector<std::string>>();
    const auto rows = j["vectors"].get<std::vector<std::vector<double>>>();
    const std::size_t dim = rows.empty() ? 0 : rows.front().size();
    e.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != dim) throw ProtocolError("ragged embedding vectors");
      for (std::size_t c = 0; c < dim; ++c) {
        e.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ProtocolError(std::string("malformed embedding payload: ") + ex.what());
  }
  try {
    e.validate();
  } catch (const DataError& ex) {
    throw ProtocolError(ex.what());
  }
  return e;
}

FixtureEmbeddingProvider::FixtureEmbeddingProvider(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding fixture " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
    if (!j.contains("text") || !j["text"].is_string()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": missing 'text'");
    }
    try {
      table_[j["text"].get<std::string>()] = embeddings_from_json(j);
    } catch (const ProtocolError& ex) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
}

TokenEmbeddings FixtureEmbeddingProvider::embed(const std::string& text) {
  const auto it = table_.find(text);
  if (it == table_.end()) throw DataError("no fixture embedding for text: " + text);
  return it->second;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(const std::string& url,
                                             std::shared_ptr<HttpTransport> transport,
                                             RetryPolicy policy, std::chrono::milliseconds timeout,
                                             Sleeper sleeper)
    : path_(parse_base_url(url).path_prefix),
      poster_(transport ? std::move(transport) : make_http_transport(parse_base_url(url).origin),
              policy, std::move(sleeper)),
      timeout_(timeout) {
  if (path_.empty()) path_ = "/";
}

TokenEmbeddings HttpEmbeddingProvider::embed(const std::string& text) {
  const nlohmann::json body = {{"text", text}};
  const auto out = poster_.post(path_, body.dump(), {}, timeout_);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(out.response.body);
  } catch (const nlohmann::json::exception& ex) {
    throw ProtocolError(std::string("embedding endpoint returned invalid JSON: ") + ex.what());
  }
  return embeddings_from_json(j);
}

EmbeddingCache::EmbeddingCache(std::shared_ptr<EmbeddingProvider> provider)
    : provider_(std::move(provider)) {
  if (!provider_) throw UsageError("no embedding provider configured");
}

TokenEmbeddings EmbeddingCache::fetch(const std::string& text) {
  if (text.empty()) throw DataError("cannot embed empty text");
  {
    std::lock_guard lock(mutex_);
    const auto it = cache_.find(text);
    if (it != cache_.end()) return it->second;
    ++calls_;
  }
  TokenEmbeddings e = provider_->embed(text);
  e.validate();
  std::lock_guard lock(mutex_);
  return cache_.try_emplace(text, std::move(e)).first->second;
}

std::size_t EmbeddingCache::provider_calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

TokenEmbeddings fetch_embeddings(EmbeddingCache& cache, const std::string& text) {
  return cache.fetch(text);
}

}  // namespace exitbench
