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

constexpr double kMinChildHessian = 1e-3;

// Per-feature cut points; bin b holds values in (cut[b-1], cut[b]].
struct Binning {
  std::vector<std::vector<double>> cuts;
  std::vector<std::vector<std::uint16_t>> bins;  // [feature][row]
};

Binning make_bins(const Matrix& x, int max_bins) {
  Binning b;
  const std::size_t n = x.rows();
  b.cuts.resize(x.cols());
  b.bins.resize(x.cols());
  std::vector<double> values(n);
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t i = 0; i < n; ++i) values[i] = x(i, f);
    std::sort(values.begin(), values.end());
    std::vector<double> distinct = values;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    auto& cuts = b.cuts[f];
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        double mid = 0.5 * (distinct[i] + distinct[i + 1]);
        if (!(mid < distinct[i + 1])) mid = distinct[i];
        cuts.push_back(mid);
      }
    } else {
      for (int q = 1; q < max_bins; ++q) {
        const std::size_t idx = static_cast<std::size_t>(q) * n / static_cast<std::size_t>(max_bins);
        const double v = values[std::min(idx, n - 1)];
        if (v < values.back() && (cuts.empty() || v > cuts.back())) cuts.push_back(v);
      }
    }
    auto& bins = b.bins[f];
    bins.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      bins[i] = static_cast<std::uint16_t>(
          std::lower_bound(cuts.begin(), cuts.end(), x(i, f)) - cuts.begin());
    }
  }
  return b;
}

class HistogramTreeBuilder {
 public:
  HistogramTreeBuilder(const Binning& binning, const std::vector<double>& grad,
                       const std::vector<double>& hess, const GbdtParams& hp)
      : binning_(binning), grad_(grad), hess_(hess), hp_(hp) {}

  Tree build(std::vector<std::size_t> rows) {
    tree_ = Tree(1);
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  struct Bin {
    double g = 0.0;
    double h = 0.0;
    std::size_t n = 0;
  };

  double leaf_value(double g, double h) const { return -g / (h + hp_.l2); }
  double score(double g, double h) const { return g * g / (h + hp_.l2); }

  int grow(std::vector<std::size_t>& rows, int depth) {
    double g = 0.0;
    double h = 0.0;
    for (std::size_t r : rows) {
      g += grad_[r];
      h += hess_[r];
    }
    const double value = h + hp_.l2 > 0.0 ? leaf_value(g, h) : 0.0;
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, hp_.min_samples_leaf));
    if (depth >= hp_.max_depth || rows.size() < 2 * min_leaf) return tree_.add_leaf({&value, 1});

    const double parent = score(g, h);
    double best_gain = 1e-12;
    int best_feature = -1;
    std::size_t best_bin = 0;
    for (std::size_t f = 0; f < binning_.cuts.size(); ++f) {
      const auto& cuts = binning_.cuts[f];
      if (cuts.empty()) continue;
      hist_.assign(cuts.size() + 1, Bin{});
      const auto& bins = binning_.bins[f];
      for (std::size_t r : rows) {
        Bin& b = hist_[bins[r]];
        b.g += grad_[r];
        b.h += hess_[r];
        ++b.n;
      }
      double gl = 0.0;
      double hl = 0.0;
      std::size_t nl = 0;
      for (std::size_t b = 0; b < cuts.size(); ++b) {
        gl += hist_[b].g;
        hl += hist_[b].h;
        nl += hist_[b].n;
        const std::size_t nr = rows.size() - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double hr = h - hl;
        if (hl < kMinChildHessian || hr < kMinChildHessian) continue;
        const double gain = score(gl, hl) + score(g - gl, hr) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_bin = b;
        }
      }
    }
    if (best_feature < 0) return tree_.add_leaf({&value, 1});

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    const auto& bins = binning_.bins[static_cast<std::size_t>(best_feature)];
    for (std::size_t r : rows) (bins[r] <= best_bin ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int node =
        tree_.add_split(best_feature, binning_.cuts[static_cast<std::size_t>(best_feature)][best_bin]);
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.set_children(node, l, r);
    return node;
  }

  const Binning& binning_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  GbdtParams hp_;
  Tree tree_{1};
  std::vector<Bin> hist_;
};

struct Booster {
  double base = 0.0;
  double learning_rate = 0.0;
  std::vector<Tree> trees;

  double raw(std::span<const double> row) const {
    double f = base;
    for (const Tree& t : trees) f += learning_rate * t.leaf_values(row)[0];
    return f;
  }
};

// Logistic-loss boosting with Newton leaf values.
Booster fit_booster(const Matrix& x, const Binning& binning, const std::vector<double>& target,
                    const GbdtParams& hp) {
  const std::size_t n = x.rows();
  const double pos = std::accumulate(target.begin(), target.end(), 0.0);
  const double prior = std::clamp(pos / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
  Booster booster;
  booster.base = std::log(prior / (1.0 - prior));
  booster.learning_rate = hp.learning_rate;

  std::vector<double> raw(n, booster.base);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<std::size_t> rows(n);
  for (int stage = 0; stage < hp.n_estimators; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(raw[i]);
      grad[i] = p - target[i];
      hess[i] = std::max(p * (1.0 - p), 1e-16);
    }
    std::iota(rows.begin(), rows.end(), 0);
    HistogramTreeBuilder builder(binning, grad, hess, hp);
    Tree tree = builder.build(rows);
    for (std::size_t i = 0; i < n; ++i) raw[i] += hp.learning_rate * tree.leaf_values(x.row(i))[0];
    booster.trees.push_back(std::move(tree));
  }
  return booster;
}

class GbdtClassifier final : public Classifier {
 public:
  GbdtClassifier(std::vector<Booster> boosters, std::size_t n_classes)
      : boosters_(std::move(boosters)), n_classes_(n_classes) {}

  std::size_t n_classes() const override { return n_classes_; }

  void predict_proba(const Matrix& rows, Matrix& out) const override {
    out = Matrix(rows.rows(), n_classes_);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      auto dst = out.row(i);
      if (n_classes_ == 2) {
        const double p1 = sigmoid(boosters_[0].raw(rows.row(i)));
        dst[0] = 1.0 - p1;
        dst[1] = p1;
        continue;
      }
      double total = 0.0;
      for (std::size_t c = 0; c < n_classes_; ++c) {
        dst[c] = sigmoid(boosters_[c].raw(rows.row(i)));
        total += dst[c];
      }
      for (double& v : dst) v /= total;
    }
  }

  nlohmann::json parameters() const override {
    nlohmann::json boosters = nlohmann::json::array();
    for (const auto& b : boosters_) {
      nlohmann::json trees = nlohmann::json::array();
      for (const Tree& t : b.trees) trees.push_back(t.to_json());
      boosters.push_back({{"base", b.base}, {"learning_rate", b.learning_rate}, {"trees", trees}});
    }
    return {{"n_classes", n_classes_}, {"boosters", boosters}};
  }

 private:
  std::vector<Booster> boosters_;
  std::size_t n_classes_;
};

}  // namespace

ClassifierPtr fit_gbdt(const GbdtParams& hp, const TrainingData& data) {
  const Binning binning = make_bins(data.x, std::clamp(hp.max_bins, 2, 65535));
  const std::size_t k = static_cast<std::size_t>(data.n_classes);
  const std::size_t n_boosters = k == 2 ? 1 : k;
  std::vector<Booster> boosters;
  for (std::size_t m = 0; m < n_boosters; ++m) {
    const int positive = k == 2 ? 1 : static_cast<int>(m);
    std::vector<double> target(data.x.rows());
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = data.y[i] == positive ? 1.0 : 0.0;
    boosters.push_back(fit_booster(data.x, binning, target, hp));
  }
  return std::make_shared<GbdtClassifier>(std::move(boosters), k);
}

ClassifierPtr load_gbdt(const nlohmann::json& params) {
  std::vector<Booster> boosters;
  for (const auto& doc : params.at("boosters")) {
    Booster b;
    b.base = doc.at("base").get<double>();
    b.learning_rate = doc.at("learning_rate").get<double>();
    for (const auto& t : doc.at("trees")) b.trees.push_back(Tree::from_json(t));
    boosters.push_back(std::move(b));
  }
  const auto k = params.at("n_classes").get<std::size_t>();
  if (boosters.size() != (k == 2 ? 1 : k)) throw Error(ErrorKind::kData, "malformed GBDT model");
  return std::make_shared<GbdtClassifier>(std::move(boosters), k);
}

}  // namespace featfuse::detail
