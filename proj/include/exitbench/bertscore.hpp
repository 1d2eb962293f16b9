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
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "exitbench/error.hpp"
#include "exitbench/http_transport.hpp"

namespace exitbench {

template <typename Scalar>
struct BasicBertScore {
  Scalar precision = 0;
  Scalar recall = 0;
  Scalar f1 = 0;
  bool idf_used = false;
};
using BertScoreResult = BasicBertScore<double>;

// Row-normalized copy. Throws DataError on a zero-norm or non-finite row.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> normalize_rows(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Scalar n = out.row(i).norm();
    if (!(n > Scalar(0)) || !std::isfinite(static_cast<double>(n))) {
      throw DataError("embedding row " + std::to_string(i) + " has zero or non-finite norm");
    }
    out.row(i) /= n;
  }
  return out;
}

// Cosine similarity matrix S(i, j) = cos(candidate_i, reference_j).
template <typename DA, typename DB>
Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> cosine_matrix(
    const Eigen::MatrixBase<DA>& candidate, const Eigen::MatrixBase<DB>& reference) {
  if (candidate.rows() == 0 || reference.rows() == 0) {
    throw DataError("BERTScore needs at least one token on each side");
  }
  if (candidate.cols() != reference.cols() || candidate.cols() == 0) {
    throw DataError("embedding dimension mismatch: " + std::to_string(candidate.cols()) +
                    " vs " + std::to_string(reference.cols()));
  }
  return normalize_rows(candidate) * normalize_rows(reference).transpose();
}

// Greedy matching over a similarity matrix. Empty weight vectors mean
// uniform weights.
template <typename Derived>
BasicBertScore<typename Derived::Scalar> greedy_match(
    const Eigen::MatrixBase<Derived>& sim,
    const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>& candidate_weights = {},
    const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>& reference_weights = {}) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Vec row_max = sim.rowwise().maxCoeff();
  const Vec col_max = sim.colwise().maxCoeff().transpose();
  auto weighted_mean = [](const Vec& v, const Vec& w) -> Scalar {
    if (w.size() == 0) return v.mean();
    if (w.size() != v.size()) throw DataError("idf weight count does not match token count");
    const Scalar total = w.sum();
    return total > Scalar(0) ? v.dot(w) / total : Scalar(0);
  };
  BasicBertScore<Scalar> r;
  r.precision = weighted_mean(row_max, candidate_weights);
  r.recall = weighted_mean(col_max, reference_weights);
  const Scalar denom = r.precision + r.recall;
  r.f1 = denom == Scalar(0) ? Scalar(0) : Scalar(2) * r.precision * r.recall / denom;
  r.idf_used = candidate_weights.size() != 0 || reference_weights.size() != 0;
  return r;
}

template <typename DA, typename DB>
BasicBertScore<typename DA::Scalar> bertscore(const Eigen::MatrixBase<DA>& candidate,
                                              const Eigen::MatrixBase<DB>& reference) {
  return greedy_match(cosine_matrix(candidate, reference));
}

struct TokenEmbeddings {
  std::vector<std::string> tokens;
  Eigen::MatrixXd vectors;  // tokens x dimensions
  std::optional<Eigen::VectorXd> idf;

  // Throws DataError when rows and tokens disagree or a value is non-finite.
  void validate() const;
};

BertScoreResult bertscore(const TokenEmbeddings& candidate, const TokenEmbeddings& reference);

// Inverse document frequency over a reference corpus, add-one smoothed:
// log((N + 1) / (df + 1)).
std::map<std::string, double> compute_idf(const std::vector<std::vector<std::string>>& documents);

// Attaches weights from `idf`; tokens not in the table get log(N + 1), the
// weight of a token that appears in no document.
void attach_idf(TokenEmbeddings& e, const std::map<std::string, double>& idf,
                std::size_t n_documents);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual TokenEmbeddings embed(const std::string& text) = 0;
};

// JSONL lines of {text, tokens, vectors}.
class FixtureEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit FixtureEmbeddingProvider(const std::filesystem::path& path);
  TokenEmbeddings embed(const std::string& text) override;
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::unordered_map<std::string, TokenEmbeddings> table_;
};

// POST {text} -> {tokens, vectors}, retried with the shared policy.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(const std::string& url, std::shared_ptr<HttpTransport> transport,
                        RetryPolicy policy, std::chrono::milliseconds timeout,
                        Sleeper sleeper = real_sleeper());
  TokenEmbeddings embed(const std::string& text) override;

 private:
  std::string path_;
  RetryingPoster poster_;
  std::chrono::milliseconds timeout_;
};

TokenEmbeddings embeddings_from_json(const nlohmann::json& j);

// Memoizes provider results by text. Lookups are serialized; the provider is
// called outside the lock.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::shared_ptr<EmbeddingProvider> provider);

  // Throws DataError for empty text.
  TokenEmbeddings fetch(const std::string& text);
  std::size_t provider_calls() const;

 private:
  std::shared_ptr<EmbeddingProvider> provider_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, TokenEmbeddings> cache_;
  std::size_t calls_ = 0;
};

TokenEmbeddings fetch_embeddings(EmbeddingCache& cache, const std::string& text);

}  // namespace exitbench
