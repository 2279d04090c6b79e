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
#include <span>
#include <vector>

#include "featfuse/common.hpp"

namespace featfuse::detail {

// Fully connected ReLU network. Binary problems use one sigmoid output with
// binary cross-entropy; K > 2 classes use a softmax output with categorical
// cross-entropy.
//
// Parameters are stored flat, layer by layer: weights (out x in, row-major)
// followed by biases.
class MlpNetwork {
 public:
  MlpNetwork(std::size_t n_inputs, std::vector<int> hidden, std::size_t n_classes);

  std::size_t n_inputs() const noexcept { return sizes_.front(); }
  std::size_t n_classes() const noexcept { return n_classes_; }
  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  // Total hidden units; the width of a dropout scale row.
  std::size_t hidden_units() const;

  std::vector<double>& parameters() noexcept { return params_; }
  const std::vector<double>& parameters() const noexcept { return params_; }

  // Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  void initialize(Rng& rng);

  void predict_proba(const Matrix& x, Matrix& out) const;

  // Mean loss over the rows of `x`. `dropout_scale` is empty (no dropout) or
  // rows x hidden_units() multipliers applied after each ReLU. When `grad`
  // is non-null it receives d(loss)/d(parameters).
  double loss_and_gradient(const Matrix& x, std::span<const int> y,
                           std::span<const double> dropout_scale,
                           std::vector<double>* grad) const;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
  }
  std::size_t output_units() const { return sizes_.back(); }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::size_t n_classes_;
  std::vector<double> params_;
};

}  // namespace featfuse::detail
