// Copyright 2026 The featfuse Authors
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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "models/classifier.hpp"
#include "models/tree.hpp"

namespace featfuse::detail {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Per-class stage contribution (K-1) * (log p_k - mean_j log p_j), with
// probabilities clipped below at machine epsilon.
void stage_scores(std::span<const double> proba, std::span<double> out) {
  const auto k = static_cast<double>(proba.size());
  double mean_log = 0.0;
  for (std::size_t c = 0; c < proba.size(); ++c) {
    out[c] = std::log(std::max(proba[c], kEps));
    mean_log += out[c];
  }
  mean_log /= k;
  for (double& v : out) v = (k - 1.0) * (v - mean_log);
}

class AdaBoostClassifier final : public Classifier {
 public:
  AdaBoostClassifier(std::vector<Tree> trees, std::size_t n_classes)
      : trees_(std::move(trees)), n_classes_(n_classes) {}

  std::size_t n_classes() const override { return n_classes_; }

  void predict_proba(const Matrix& rows, Matrix& out) const override {
    out = Matrix(rows.rows(), n_classes_);
    const auto k = static_cast<double>(n_classes_);
    std::vector<double> stage(n_classes_);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      auto dst = out.row(i);
      for (const Tree& t : trees_) {
        stage_scores(t.leaf_values(rows.row(i)), stage);
        for (std::size_t c = 0; c < n_classes_; ++c) dst[c] += stage[c];
      }
      // Average stage scores, then softmax(decision / (K - 1)).
      double max_v = -std::numeric_limits<double>::infinity();
      for (double& v : dst) {
        v = v / static_cast<double>(trees_.size()) / (k - 1.0);
        max_v = std::max(max_v, v);
      }
      double total = 0.0;
      for (double& v : dst) {
        v = std::exp(v - max_v);
        total += v;
      }
      for (double& v : dst) v /= total;
    }
  }

  nlohmann::json parameters() const override {
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& t : trees_) trees.push_back(t.to_json());
    return {{"n_classes", n_classes_}, {"trees", trees}};
  }

  std::size_t stages() const { return trees_.size(); }

 private:
  std::vector<Tree> trees_;
  std::size_t n_classes_;
};

}  // namespace

// SAMME.R: real-valued boosting on class-probability estimates.
ClassifierPtr fit_adaboost(const AdaBoostParams& hp, const TrainingData& data,
                           std::uint64_t seed) {
  const std::size_t n = data.x.rows();
  const std::size_t k = static_cast<std::size_t>(data.n_classes);
  const double kd = static_cast<double>(k);
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::vector<std::size_t> samples(n);
  std::iota(samples.begin(), samples.end(), 0);
  const ClassificationTreeOptions options{hp.base_max_depth, hp.base_min_samples_leaf,
                                          hp.base_min_samples_split, 0};

  std::vector<Tree> trees;
  for (int stage = 0; stage < hp.n_estimators; ++stage) {
    Tree tree = fit_classification_tree(data.x, data.y, data.n_classes, weights, samples, options,
                                        derive_seed(seed, {static_cast<std::uint64_t>(stage)}));
    double error = 0.0;
    std::vector<double> estimator_weight(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto proba = tree.leaf_values(data.x.row(i));
      if (static_cast<int>(argmax(proba)) != data.y[i]) error += weights[i];
      // y coding: 1 for the true class, -1/(K-1) elsewhere.
      double s = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        const double code = static_cast<int>(c) == data.y[i] ? 1.0 : -1.0 / (kd - 1.0);
        s += code * std::log(std::max(proba[c], kEps));
      }
      estimator_weight[i] = -hp.learning_rate * ((kd - 1.0) / kd) * s;
    }
    trees.push_back(std::move(tree));
    if (error <= 0.0) break;
    if (stage + 1 == hp.n_estimators) break;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i] > 0.0 || estimator_weight[i] < 0.0) {
        weights[i] *= std::exp(estimator_weight[i]);
      }
      total += weights[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) break;
    for (double& w : weights) w /= total;
  }
  return std::make_shared<AdaBoostClassifier>(std::move(trees), k);
}

ClassifierPtr load_adaboost(const nlohmann::json& params) {
  std::vector<Tree> trees;
  for (const auto& t : params.at("trees")) trees.push_back(Tree::from_json(t));
  if (trees.empty()) throw Error(ErrorKind::kData, "AdaBoost model without stages");
  return std::make_shared<AdaBoostClassifier>(std::move(trees),
                                              params.at("n_classes").get<std::size_t>());
}

}  // namespace featfuse::detail
