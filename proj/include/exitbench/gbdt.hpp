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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace exitbench::gbdt {

struct GbdtConfig {
  int n_rounds = 100;
  int max_depth = 4;
  double learning_rate = 0.1;
  double lambda = 1.0;  // L2 penalty on leaf weights
  double gamma = 0.0;   // minimum gain to split
  double min_child_weight = 1.0;
  std::uint64_t seed = 0;  // recorded only; fitting is deterministic

  // Throws UsageError on an out-of-range field.
  void validate() const;
  friend bool operator==(const GbdtConfig&, const GbdtConfig&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // rows with x[feature] <= threshold go left
  int left = -1;
  int right = -1;
  double weight = 0.0;  // leaf output, learning rate already applied

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  int depth() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct GbdtModel {
  double base_score = 0.0;  // log-odds of the training prior
  std::vector<Tree> trees;
  GbdtConfig config;
  int n_features = 0;
  std::vector<std::string> feature_names;

  friend bool operator==(const GbdtModel&, const GbdtModel&) = default;
};

// Second-order boosting with logistic loss and exact greedy splits. Ties
// between equal-gain splits go to the lowest feature index, then the lowest
// threshold. Throws DataError for single-class labels or non-finite inputs.
GbdtModel fit(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
              const GbdtConfig& config = {});

// Raw score using the first `n_trees` trees (all by default).
double predict_margin(const GbdtModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                      std::optional<std::size_t> n_trees = std::nullopt);

// Clamped to [1e-15, 1 - 1e-15], so always strictly inside (0, 1).
double predict_proba(const GbdtModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
int predict(const GbdtModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
            double threshold = 0.5);

// Row-wise versions over a samples x features matrix.
Eigen::VectorXd predict_proba_rows(const GbdtModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X);
Eigen::VectorXi predict_rows(const GbdtModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                        double threshold = 0.5);

// Mean logistic loss of the model truncated to `n_trees`.
double log_loss(const GbdtModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                const Eigen::Ref<const Eigen::VectorXi>& y,
                std::optional<std::size_t> n_trees = std::nullopt);

double sigmoid(double z);

nlohmann::ordered_json to_json(const GbdtModel& model);
GbdtModel from_json(const nlohmann::ordered_json& j);
void save(const GbdtModel& model, const std::filesystem::path& path);
GbdtModel load(const std::filesystem::path& path);

}  // namespace exitbench::gbdt
