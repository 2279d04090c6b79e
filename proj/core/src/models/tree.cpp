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

#include "models/tree.hpp"

#include <algorithm>
#include <numeric>

#include "models/classifier.hpp"

namespace featfuse::detail {

int Tree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    const auto [node, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[node].feature >= 0) {
      stack.emplace_back(nodes_[node].left, d + 1);
      stack.emplace_back(nodes_[node].right, d + 1);
    }
  }
  return best;
}

std::span<const double> Tree::leaf_values(std::span<const double> row) const {
  int node = 0;
  while (nodes_[node].feature >= 0) {
    const Node& n = nodes_[node];
    node = row[n.feature] <= n.threshold ? n.left : n.right;
  }
  return {values_.data() + nodes_[node].value_offset, n_outputs_};
}

int Tree::add_leaf(std::span<const double> values) {
  Node n;
  n.value_offset = values_.size();
  values_.insert(values_.end(), values.begin(), values.end());
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size() - 1);
}

int Tree::add_split(int feature, double threshold) {
  Node n;
  n.feature = feature;
  n.threshold = threshold;
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size() - 1);
}

void Tree::set_children(int node, int left, int right) {
  nodes_[node].left = left;
  nodes_[node].right = right;
}

nlohmann::json Tree::to_json() const {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<std::size_t> offset;
  for (const Node& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    offset.push_back(n.value_offset);
  }
  return {{"n_outputs", n_outputs_}, {"feature", feature}, {"threshold", threshold},
          {"left", left},            {"right", right},     {"value_offset", offset},
          {"values", values_}};
}

Tree Tree::from_json(const nlohmann::json& doc) {
  Tree t(doc.at("n_outputs").get<std::size_t>());
  const auto feature = doc.at("feature").get<std::vector<int>>();
  const auto threshold = doc.at("threshold").get<std::vector<double>>();
  const auto left = doc.at("left").get<std::vector<int>>();
  const auto right = doc.at("right").get<std::vector<int>>();
  const auto offset = doc.at("value_offset").get<std::vector<std::size_t>>();
  t.values_ = doc.at("values").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || offset.size() != n ||
      n == 0) {
    throw Error(ErrorKind::kData, "malformed tree document");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int last = static_cast<int>(n);
    if (feature[i] >= 0 && (left[i] <= 0 || left[i] >= last || right[i] <= 0 || right[i] >= last)) {
      throw Error(ErrorKind::kData, "tree child index out of range");
    }
    if (feature[i] < 0 && offset[i] + t.n_outputs_ > t.values_.size()) {
      throw Error(ErrorKind::kData, "tree leaf value out of range");
    }
    t.nodes_.push_back({feature[i], threshold[i], left[i], right[i], offset[i]});
  }
  return t;
}

namespace {

class ClassificationTreeBuilder {
 public:
  ClassificationTreeBuilder(const Matrix& x, std::span<const int> y, int n_classes,
                            std::span<const double> weights,
                            const ClassificationTreeOptions& options, std::uint64_t seed)
      : x_(x),
        y_(y),
        k_(static_cast<std::size_t>(n_classes)),
        weights_(weights),
        options_(options),
        rng_(seed),
        tree_(static_cast<std::size_t>(n_classes)) {
    const int p = static_cast<int>(x.cols());
    n_candidates_ = options.max_features <= 0 || options.max_features >= p
                        ? static_cast<std::size_t>(p)
                        : static_cast<std::size_t>(options.max_features);
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), 0);
    left_.resize(k_);
    total_.resize(k_);
  }

  Tree build(std::vector<std::size_t> samples) {
    grow(samples, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;
  };

  double weight(std::size_t row) const { return weights_.empty() ? 1.0 : weights_[row]; }

  int grow(std::vector<std::size_t>& samples, int depth) {
    std::fill(total_.begin(), total_.end(), 0.0);
    double total_weight = 0.0;
    for (std::size_t s : samples) {
      total_[y_[s]] += weight(s);
      total_weight += weight(s);
    }
    std::vector<double> leaf(k_, 0.0);
    std::size_t nonzero = 0;
    for (std::size_t c = 0; c < k_; ++c) {
      leaf[c] = total_weight > 0.0 ? total_[c] / total_weight : 1.0 / static_cast<double>(k_);
      if (total_[c] > 0.0) ++nonzero;
    }

    const auto m = static_cast<int>(samples.size());
    const bool can_split = depth < options_.max_depth && m >= options_.min_samples_split &&
                           m >= 2 * options_.min_samples_leaf && nonzero > 1;
    Split best;
    if (can_split) best = find_split(samples, total_weight);
    if (best.feature < 0) return tree_.add_leaf(leaf);

    std::vector<std::size_t> left_samples;
    std::vector<std::size_t> right_samples;
    for (std::size_t s : samples) {
      (x_(s, best.feature) <= best.threshold ? left_samples : right_samples).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    const int node = tree_.add_split(best.feature, best.threshold);
    const int l = grow(left_samples, depth + 1);
    const int r = grow(right_samples, depth + 1);
    tree_.set_children(node, l, r);
    return node;
  }

  Split find_split(const std::vector<std::size_t>& samples, double total_weight) {
    // Candidate features: a seeded subset, examined in ascending index order
    // so that the all-features case is independent of the random stream.
    std::vector<std::size_t> candidates;
    if (n_candidates_ == features_.size()) {
      candidates = features_;
    } else {
      for (std::size_t i = 0; i < n_candidates_; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng_.below(features_.size() - i));
        std::swap(features_[i], features_[j]);
      }
      candidates.assign(features_.begin(), features_.begin() + n_candidates_);
      std::sort(candidates.begin(), candidates.end());
    }

    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, options_.min_samples_leaf));
    Split best;
    bool found = false;
    order_.resize(samples.size());
    for (std::size_t f : candidates) {
      for (std::size_t i = 0; i < samples.size(); ++i) order_[i] = {x_(samples[i], f), samples[i]};
      std::sort(order_.begin(), order_.end());
      std::fill(left_.begin(), left_.end(), 0.0);
      double left_weight = 0.0;
      for (std::size_t i = 0; i + 1 < order_.size(); ++i) {
        const std::size_t row = order_[i].second;
        left_[y_[row]] += weight(row);
        left_weight += weight(row);
        const double v = order_[i].first;
        const double next = order_[i + 1].first;
        if (!(v < next)) continue;
        const std::size_t n_left = i + 1;
        if (n_left < min_leaf || order_.size() - n_left < min_leaf) continue;
        const double right_weight = total_weight - left_weight;
        if (left_weight <= 0.0 || right_weight <= 0.0) continue;
        // Maximizing sum_k L_k^2/W_L + R_k^2/W_R minimizes weighted Gini.
        double sl = 0.0;
        double sr = 0.0;
        for (std::size_t c = 0; c < k_; ++c) {
          sl += left_[c] * left_[c];
          const double rc = total_[c] - left_[c];
          sr += rc * rc;
        }
        const double score = sl / left_weight + sr / right_weight;
        if (!found || score > best.score * (1.0 + 1e-12) + 1e-300) {
          double threshold = 0.5 * (v + next);
          if (!(threshold < next)) threshold = v;
          best = {static_cast<int>(f), threshold, score};
          found = true;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::size_t k_;
  std::span<const double> weights_;
  ClassificationTreeOptions options_;
  Rng rng_;
  Tree tree_;
  std::size_t n_candidates_ = 0;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, std::size_t>> order_;
  std::vector<double> left_;
  std::vector<double> total_;
};

class DecisionTreeClassifier final : public Classifier {
 public:
  DecisionTreeClassifier(Tree tree, std::size_t n_classes)
      : tree_(std::move(tree)), n_classes_(n_classes) {}

  std::size_t n_classes() const override { return n_classes_; }

  void predict_proba(const Matrix& rows, Matrix& out) const override {
    out = Matrix(rows.rows(), n_classes_);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      const auto v = tree_.leaf_values(rows.row(i));
      std::copy(v.begin(), v.end(), out.row(i).begin());
    }
  }

  nlohmann::json parameters() const override {
    return {{"n_classes", n_classes_}, {"tree", tree_.to_json()}};
  }

 private:
  Tree tree_;
  std::size_t n_classes_;
};

}  // namespace

Tree fit_classification_tree(const Matrix& x, std::span<const int> y, int n_classes,
                             std::span<const double> weights,
                             std::span<const std::size_t> samples,
                             const ClassificationTreeOptions& options, std::uint64_t seed) {
  ClassificationTreeBuilder builder(x, y, n_classes, weights, options, seed);
  return builder.build(std::vector<std::size_t>(samples.begin(), samples.end()));
}

ClassifierPtr fit_decision_tree(const DecisionTreeParams& hp, const TrainingData& data,
                                std::uint64_t seed) {
  std::vector<std::size_t> samples(data.x.rows());
  std::iota(samples.begin(), samples.end(), 0);
  const ClassificationTreeOptions options{hp.max_depth, hp.min_samples_leaf, hp.min_samples_split,
                                          hp.max_features};
  Tree tree = fit_classification_tree(data.x, data.y, data.n_classes, {}, samples, options, seed);
  return std::make_shared<DecisionTreeClassifier>(std::move(tree),
                                                  static_cast<std::size_t>(data.n_classes));
}

ClassifierPtr load_decision_tree(const nlohmann::json& params) {
  return std::make_shared<DecisionTreeClassifier>(Tree::from_json(params.at("tree")),
                                                  params.at("n_classes").get<std::size_t>());
}

}  // namespace featfuse::detail
