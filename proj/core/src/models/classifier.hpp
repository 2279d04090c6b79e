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

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "featfuse/common.hpp"
#include "featfuse/models.hpp"

namespace featfuse::detail {

// Fitted model over class indices 0..K-1 (the public wrapper maps them to ids).
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::size_t n_classes() const = 0;
  // Writes one probability row per input row into `out` (rows x n_classes).
  virtual void predict_proba(const Matrix& rows, Matrix& out) const = 0;
  virtual nlohmann::json parameters() const = 0;
  virtual bool warning() const { return false; }
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

// Training inputs with labels already encoded as class indices.
struct TrainingData {
  const Matrix& x;
  std::span<const int> y;
  int n_classes;
};

ClassifierPtr fit_decision_tree(const DecisionTreeParams& hp, const TrainingData& data,
                                std::uint64_t seed);
ClassifierPtr fit_random_forest(const RandomForestParams& hp, const TrainingData& data,
                                std::uint64_t seed);
ClassifierPtr fit_knn(const KnnParams& hp, const TrainingData& data);
ClassifierPtr fit_svm(const SvmParams& hp, const TrainingData& data, std::uint64_t seed);
ClassifierPtr fit_adaboost(const AdaBoostParams& hp, const TrainingData& data, std::uint64_t seed);
ClassifierPtr fit_mlp(const MlpParams& hp, const TrainingData& data, std::uint64_t seed);
ClassifierPtr fit_logistic(const LogisticParams& hp, const TrainingData& data);
ClassifierPtr fit_gbdt(const GbdtParams& hp, const TrainingData& data);

ClassifierPtr load_decision_tree(const nlohmann::json& params);
ClassifierPtr load_random_forest(const nlohmann::json& params);
ClassifierPtr load_knn(const nlohmann::json& params);
ClassifierPtr load_svm(const nlohmann::json& params);
ClassifierPtr load_adaboost(const nlohmann::json& params);
ClassifierPtr load_mlp(const nlohmann::json& params);
ClassifierPtr load_logistic(const nlohmann::json& params);
ClassifierPtr load_gbdt(const nlohmann::json& params);

// Numerically safe logistic function.
double sigmoid(double z);

}  // namespace featfuse::detail
