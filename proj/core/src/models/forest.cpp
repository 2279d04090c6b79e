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
#include <numeric>

#include "models/classifier.hpp"
#include "models/tree.hpp"

namespace featfuse::detail {
namespace {

class RandomForestClassifier final : public Classifier {
 public:
  RandomForestClassifier(std::vector<Tree> trees, std::size_t n_classes)
      : trees_(std::move(trees)), n_classes_(n_classes) {}

  std::size_t n_classes() const override { return n_classes_; }

  void predict_proba(const Matrix& rows, Matrix& out) const override {
    out = Matrix(rows.rows(), n_classes_);
    const double scale = 1.0 / static_cast<double>(trees_.size());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      auto dst = out.row(i);
      for (const Tree& t : trees_) {
        const auto v = t.leaf_values(rows.row(i));
        for (std::size_t c = 0; c < n_classes_; ++c) dst[c] += v[c];
      }
      for (double& v : dst) v *= scale;
    }
  }

  nlohmann::json parameters() const override {
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& t : trees_) trees.push_back(t.to_json());
    return {{"n_classes", n_classes_}, {"trees", trees}};
  }

 private:
  std::vector<Tree> trees_;
  std::size_t n_classes_;
};

}  // namespace

ClassifierPtr fit_random_forest(const RandomForestParams& hp, const TrainingData& data,
                                std::uint64_t seed) {
  const std::size_t n = data.x.rows();
  const int p = static_cast<int>(data.x.cols());
  const int max_features =
      hp.max_features > 0 ? hp.max_features
                          : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p)))));
  const ClassificationTreeOptions options{hp.max_depth, hp.min_samples_leaf, hp.min_samples_split,
                                          max_features};
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(hp.n_estimators));
  std::vector<std::size_t> samples(n);
  for (int t = 0; t < hp.n_estimators; ++t) {
    const std::uint64_t tree_seed = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    if (hp.bootstrap) {
      Rng rng(derive_seed(tree_seed, {fnv1a64("bootstrap")}));
      for (auto& s : samples) s = static_cast<std::size_t>(rng.below(n));
      std::sort(samples.begin(), samples.end());
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    trees.push_back(fit_classification_tree(data.x, data.y, data.n_classes, {}, samples, options,
                                            tree_seed));
  }
  return std::make_shared<RandomForestClassifier>(std::move(trees),
                                                  static_cast<std::size_t>(data.n_classes));
}

ClassifierPtr load_random_forest(const nlohmann::json& params) {
  std::vector<Tree> trees;
  for (const auto& t : params.at("trees")) trees.push_back(Tree::from_json(t));
  if (trees.empty()) throw Error(ErrorKind::kData, "random forest without trees");
  return std::make_shared<RandomForestClassifier>(std::move(trees),
                                                  params.at("n_classes").get<std::size_t>());
}

}  // namespace featfuse::detail
