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
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "featfuse/common.hpp"
#include "featfuse/data.hpp"

namespace featfuse {

enum class ModelFamily {
  kDecisionTree,
  kRandomForest,
  kKnn,
  kSvmRbf,
  kAdaBoost,
  kMlp,
  kLogisticRegression,
  kGbdt,
};

// Preset tag for the gradient-boosting family. Presets only change defaults.
enum class GbdtPreset { kLgbmLike, kCatboostLike };

std::string_view to_string(ModelFamily family);
ModelFamily parse_model_family(std::string_view name);
std::string_view to_string(GbdtPreset preset);
GbdtPreset parse_gbdt_preset(std::string_view name);

struct DecisionTreeParams {
  int max_depth = 50;
  int min_samples_leaf = 4;
  int min_samples_split = 2;
  // Features examined per split; 0 means all.
  int max_features = 0;
};

struct RandomForestParams {
  int n_estimators = 100;
  int max_depth = 50;
  int min_samples_leaf = 1;
  int min_samples_split = 2;
  // 0 means floor(sqrt(p)), at least 1.
  int max_features = 0;
  bool bootstrap = true;
};

struct KnnParams {
  int k = 5;
  double minkowski_p = 2.0;
};

struct SvmParams {
  double c = 1.0;
  // <= 0 means 1 / feature_count.
  double gamma = 0.0;
  double tolerance = 1e-3;
  // Iteration cap as a multiple of the training-set size.
  int max_iter_factor = 10;
  // Training rows used (seeded subsample when exceeded); 0 means all.
  int max_train_rows = 0;
};

struct AdaBoostParams {
  int n_estimators = 200;
  double learning_rate = 1.0;
  int base_max_depth = 50;
  int base_min_samples_leaf = 1;
  int base_min_samples_split = 2;
};

struct MlpParams {
  std::vector<int> hidden{16};
  double dropout = 0.1;
  int epochs = 5;
  int batch_size = 100;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct LogisticParams {
  double c = 1.0;
  int max_iter = 1000;
  bool balanced = true;
  double tolerance = 1e-8;
};

struct GbdtParams {
  GbdtPreset preset = GbdtPreset::kLgbmLike;
  int n_estimators = 100;
  double learning_rate = 0.03;
  int max_depth = 10;
  int min_samples_leaf = 20;
  double l2 = 0.0;
  int max_bins = 255;
};

GbdtParams gbdt_preset_defaults(GbdtPreset preset);

using Hyperparameters = std::variant<DecisionTreeParams, RandomForestParams, KnnParams, SvmParams,
                                     AdaBoostParams, MlpParams, LogisticParams, GbdtParams>;

ModelFamily family_of(const Hyperparameters& hp);
Hyperparameters default_hyperparameters(ModelFamily family,
                                        GbdtPreset preset = GbdtPreset::kLgbmLike);

// Throws Error(kConfig) when a count is non-positive, a rate is outside
// (0, 1] or a depth is below 1.
void validate(const Hyperparameters& hp);

nlohmann::json to_json(const Hyperparameters& hp);
// Starts from the family defaults and applies the keys present in `overrides`.
Hyperparameters hyperparameters_from_json(ModelFamily family, const nlohmann::json& overrides);

// Short column label used in rank tables: DT, RF, KNN, SVM, AdaBoost, DNN, LR,
// LGBM or CatBoost.
std::string model_label(const Hyperparameters& hp);

namespace detail {
class Classifier;
}

// A fitted classifier. Immutable and safe to share across threads.
class TrainedModel {
 public:
  TrainedModel(ModelFamily family, Hyperparameters hp, std::vector<int> classes,
               std::size_t feature_count, std::shared_ptr<const detail::Classifier> impl);

  ModelFamily family() const noexcept { return family_; }
  const Hyperparameters& hyperparameters() const noexcept { return hp_; }
  // Sorted class ids; probability columns follow this order.
  const std::vector<int>& classes() const noexcept { return classes_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  // Set when training stopped at an iteration cap before convergence.
  bool warning() const noexcept;
  std::string label() const { return model_label(hp_); }

  // One row per input row, one column per class; rows lie on the simplex.
  Matrix predict_proba(const Matrix& rows) const;
  // Argmax of predict_proba mapped to class ids; ties go to the lower id.
  std::vector<int> predict(const Matrix& rows) const;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& doc);

  const detail::Classifier& impl() const { return *impl_; }

 private:
  ModelFamily family_;
  Hyperparameters hp_;
  std::vector<int> classes_;
  std::size_t feature_count_;
  std::shared_ptr<const detail::Classifier> impl_;
};

TrainedModel train(const Hyperparameters& hp, const Dataset& train_set, std::uint64_t seed);
// Same, checking that `hp` belongs to `family` (Error(kConfig) otherwise).
TrainedModel train(ModelFamily family, const Hyperparameters& hp, const Dataset& train_set,
                   std::uint64_t seed);

// Index of the largest entry; the first (lowest) index wins ties.
std::size_t argmax(std::span<const double> values);

inline constexpr int kModelFormatVersion = 1;

}  // namespace featfuse
