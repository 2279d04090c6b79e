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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "featfuse/common.hpp"

namespace featfuse::detail {

// Binary decision tree with vector-valued leaves. A row goes left when
// row[feature] <= threshold.
class Tree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t value_offset = 0;
  };

  explicit Tree(std::size_t n_outputs = 1) : n_outputs_(n_outputs) {}

  std::size_t n_outputs() const noexcept { return n_outputs_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  int depth() const;

  std::span<const double> leaf_values(std::span<const double> row) const;

  int add_leaf(std::span<const double> values);
  int add_split(int feature, double threshold);
  void set_children(int node, int left, int right);

  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& doc);

 private:
  std::size_t n_outputs_;
  std::vector<Node> nodes_;
  std::vector<double> values_;
};

struct ClassificationTreeOptions {
  int max_depth = 50;
  int min_samples_leaf = 1;
  int min_samples_split = 2;
  // Features examined per split; 0 or >= p means all, in index order.
  int max_features = 0;
};

// Gini CART on class indices. `samples` lists the training rows to use and
// may repeat rows (bootstrap). `weights` is per row of `x`; empty means 1.
// Leaves hold normalized class-weight fractions.
Tree fit_classification_tree(const Matrix& x, std::span<const int> y, int n_classes,
                             std::span<const double> weights,
                             std::span<const std::size_t> samples,
                             const ClassificationTreeOptions& options, std::uint64_t seed);

}  // namespace featfuse::detail
