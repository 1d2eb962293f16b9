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

#include "exitbench/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "exitbench/error.hpp"

namespace exitbench::gbdt {
namespace {

constexpr int kFormatVersion = 1;
constexpr double kProbEpsilon = 1e-15;

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

// Builds one tree by exact greedy search over presorted feature columns.
class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& X, const std::vector<std::vector<Eigen::Index>>& sorted,
              const Eigen::VectorXd& grad, const Eigen::VectorXd& hess, const GbdtConfig& config)
      : X_(X), sorted_(sorted), grad_(grad), hess_(hess), config_(config),
        node_of_(static_cast<std::size_t>(X.rows()), 0) {}

  Tree build() {
    Tree tree;
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(X_.rows()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    grow(tree, rows, 0);
    return tree;
  }

 private:
  int grow(Tree& tree, const std::vector<Eigen::Index>& rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double G = 0.0;
    double H = 0.0;
    for (auto r : rows) {
      G += grad_(r);
      H += hess_(r);
    }

    if (depth < config_.max_depth && rows.size() >= 2) {
      const auto best = best_split(rows, id, G, H);
      if (best.feature >= 0) {
        std::vector<Eigen::Index> left;
        std::vector<Eigen::Index> right;
        for (auto r : rows) {
          (X_(r, best.feature) <= best.threshold ? left : right).push_back(r);
        }
        tree.nodes[static_cast<std::size_t>(id)].feature = best.feature;
        tree.nodes[static_cast<std::size_t>(id)].threshold = best.threshold;
        const int l = grow(tree, left, depth + 1);
        const int r = grow(tree, right, depth + 1);
        tree.nodes[static_cast<std::size_t>(id)].left = l;
        tree.nodes[static_cast<std::size_t>(id)].right = r;
        return id;
      }
    }
    const double denom = H + config_.lambda;
    tree.nodes[static_cast<std::size_t>(id)].weight =
        denom > 0.0 ? -G / denom * config_.learning_rate : 0.0;
    return id;
  }

  SplitCandidate best_split(const std::vector<Eigen::Index>& rows, int node, double G, double H) {
    for (auto r : rows) node_of_[static_cast<std::size_t>(r)] = node + 1;  // mark membership
    const double lambda = config_.lambda;
    const double parent = G * G / (H + lambda);
    SplitCandidate best;
    for (int f = 0; f < static_cast<int>(X_.cols()); ++f) {
      double GL = 0.0;
      double HL = 0.0;
      Eigen::Index prev = -1;
      for (auto r : sorted_[static_cast<std::size_t>(f)]) {
        if (node_of_[static_cast<std::size_t>(r)] != node + 1) continue;
        if (prev >= 0 && X_(r, f) > X_(prev, f)) {
          // Candidate boundary between X(prev, f) and X(r, f).
          const double GR = G - GL;
          const double HR = H - HL;
          if (HL >= config_.min_child_weight && HR >= config_.min_child_weight) {
            const double gain =
                0.5 * (GL * GL / (HL + lambda) + GR * GR / (HR + lambda) - parent) - config_.gamma;
            if (gain > 0.0 && gain > best.gain) {
              const double lo = X_(prev, f);
              const double hi = X_(r, f);
              double mid = lo + (hi - lo) / 2.0;
              if (!(mid < hi)) mid = lo;
              best = SplitCandidate{gain, f, mid};
            }
          }
        }
        GL += grad_(r);
        HL += hess_(r);
        prev = r;
      }
    }
    return best;
  }

  const Eigen::MatrixXd& X_;
  const std::vector<std::vector<Eigen::Index>>& sorted_;
  const Eigen::VectorXd& grad_;
  const Eigen::VectorXd& hess_;
  const GbdtConfig& config_;
  std::vector<int> node_of_;
};

void check_finite(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!x.allFinite()) throw DataError("non-finite feature value");
}

}  // namespace

void GbdtConfig::validate() const {
  if (n_rounds < 1) throw UsageError("n_rounds must be >= 1");
  if (max_depth < 1) throw UsageError("max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw UsageError("learning_rate must be in (0, 1]");
  }
  if (!(lambda >= 0.0)) throw UsageError("lambda must be >= 0");
  if (!(gamma >= 0.0)) throw UsageError("gamma must be >= 0");
  if (!(min_child_weight >= 0.0)) throw UsageError("min_child_weight must be >= 0");
}

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Tree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const auto& n = nodes[at];
    at = static_cast<std::size_t>(x(n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes[at].weight;
}

int Tree::depth() const {
  if (nodes.empty()) return 0;
  int deepest = 0;
  std::vector<std::pair<std::size_t, int>> stack = {{0, 0}};
  while (!stack.empty()) {
    auto [at, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[at].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[at].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[at].right), d + 1);
    }
  }
  return deepest;
}

GbdtModel fit(const Eigen::Ref<const Eigen::MatrixXd>& X_in,
              const Eigen::Ref<const Eigen::VectorXi>& y, const GbdtConfig& config) {
  config.validate();
  const Eigen::MatrixXd X = X_in;
  const Eigen::Index n = X.rows();
  if (n < 2) throw DataError("need at least 2 training rows");
  if (y.size() != n) throw DataError("label count does not match row count");
  if (X.cols() < 1) throw DataError("need at least one feature");
  if (!X.allFinite()) throw DataError("non-finite feature value in training data");
  Eigen::Index positives = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) != 0 && y(i) != 1) throw DataError("labels must be 0 or 1");
    positives += y(i);
  }
  if (positives == 0 || positives == n) throw DataError("training labels contain a single class");

  GbdtModel model;
  model.config = config;
  model.n_features = static_cast<int>(X.cols());
  const double prior = static_cast<double>(positives) / static_cast<double>(n);
  model.base_score = std::log(prior / (1.0 - prior));

  std::vector<std::vector<Eigen::Index>> sorted(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    auto& order = sorted[static_cast<std::size_t>(f)];
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return X(a, f) < X(b, f); });
  }

  const Eigen::VectorXd yd = y.cast<double>();
  Eigen::VectorXd score = Eigen::VectorXd::Constant(n, model.base_score);
  Eigen::VectorXd grad(n);
  Eigen::VectorXd hess(n);
  for (int round = 0; round < config.n_rounds; ++round) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(score(i));
      grad(i) = p - yd(i);
      hess(i) = p * (1.0 - p);
    }
    Tree tree = TreeBuilder(X, sorted, grad, hess, config).build();
    for (Eigen::Index i = 0; i < n; ++i) score(i) += tree.predict(X.row(i).transpose());
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double predict_margin(const GbdtModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                      std::optional<std::size_t> n_trees) {
  if (x.size() != model.n_features) {
    throw DataError("expected " + std::to_string(model.n_features) + " features, got " +
                    std::to_string(x.size()));
  }
  check_finite(x);
  const std::size_t limit = std::min(n_trees.value_or(model.trees.size()), model.trees.size());
  double s = model.base_score;
  for (std::size_t t = 0; t < limit; ++t) s += model.trees[t].predict(x);
  return s;
}

double predict_proba(const GbdtModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::clamp(sigmoid(predict_margin(model, x)), kProbEpsilon, 1.0 - kProbEpsilon);
}

int predict(const GbdtModel& model, const Eigen::Ref<const Eigen::VectorXd>& x, double threshold) {
  return predict_proba(model, x) >= threshold ? 1 : 0;
}

Eigen::VectorXd predict_proba_rows(const GbdtModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_proba(model, Eigen::VectorXd(X.row(i).transpose()));
  return out;
}

Eigen::VectorXi predict_rows(const GbdtModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                        double threshold) {
  Eigen::VectorXi out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict(model, Eigen::VectorXd(X.row(i).transpose()), threshold);
  return out;
}

double log_loss(const GbdtModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                const Eigen::Ref<const Eigen::VectorXi>& y, std::optional<std::size_t> n_trees) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double m = predict_margin(model, X.row(i).transpose(), n_trees);
    // log(1 + e^{-m}) for y = 1, log(1 + e^{m}) for y = 0, computed stably.
    const double z = y(i) ? -m : m;
    total += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  return X.rows() ? total / static_cast<double>(X.rows()) : 0.0;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::ordered_json to_json(const GbdtModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "exitbench-gbdt";
  j["version"] = kFormatVersion;
  j["n_features"] = model.n_features;
  j["feature_names"] = model.feature_names;
  j["base_score"] = model.base_score;
  j["config"] = {{"n_rounds", model.config.n_rounds},
                 {"max_depth", model.config.max_depth},
                 {"learning_rate", model.config.learning_rate},
                 {"lambda", model.config.lambda},
                 {"gamma", model.config.gamma},
                 {"min_child_weight", model.config.min_child_weight},
                 {"seed", model.config.seed}};
  nlohmann::ordered_json trees = nlohmann::ordered_json::array();
  for (const auto& t : model.trees) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& node : t.nodes) {
      if (node.is_leaf()) {
        nodes.push_back({{"leaf", node.weight}});
      } else {
        nodes.push_back({{"feature", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j;
}

GbdtModel from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("format").get<std::string>() != "exitbench-gbdt") {
      throw DataError("not a GBDT model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion) {
      throw DataError("unsupported GBDT model version " + std::to_string(version));
    }
    GbdtModel m;
    m.n_features = j.at("n_features").get<int>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.base_score = j.at("base_score").get<double>();
    const auto& c = j.at("config");
    m.config.n_rounds = c.at("n_rounds").get<int>();
    m.config.max_depth = c.at("max_depth").get<int>();
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.lambda = c.at("lambda").get<double>();
    m.config.gamma = c.at("gamma").get<double>();
    m.config.min_child_weight = c.at("min_child_weight").get<double>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    for (const auto& jt : j.at("trees")) {
      Tree t;
      for (const auto& jn : jt) {
        TreeNode node;
        if (jn.contains("leaf")) {
          node.weight = jn.at("leaf").get<double>();
        } else {
          node.feature = jn.at("feature").get<int>();
          node.threshold = jn.at("threshold").get<double>();
          node.left = jn.at("left").get<int>();
          node.right = jn.at("right").get<int>();
        }
        t.nodes.push_back(node);
      }
      const auto count = static_cast<int>(t.nodes.size());
      for (const auto& node : t.nodes) {
        if (!node.is_leaf() && (node.left <= 0 || node.left >= count || node.right <= 0 ||
                                node.right >= count || node.feature >= m.n_features)) {
          throw DataError("GBDT model has a dangling tree node");
        }
      }
      if (t.nodes.empty()) throw DataError("GBDT model has an empty tree");
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed GBDT model: ") + e.what());
  }
}

void save(const GbdtModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(model).dump(2) << '\n';
  if (!out) throw IoError("write failure on " + path.string());
}

GbdtModel load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("missing model file " + path.string());
  try {
    return from_json(nlohmann::ordered_json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace exitbench::gbdt
