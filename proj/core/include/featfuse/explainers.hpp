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
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "featfuse/common.hpp"
#include "featfuse/data.hpp"
#include "featfuse/models.hpp"

namespace featfuse {

enum class ExplainerMethod { kShap, kLime, kPermutation };

std::string_view to_string(ExplainerMethod method);
ExplainerMethod parse_explainer_method(std::string_view name);
// Column header used in rank tables: SHAP, LIME, DALEX.
std::string_view display_name(ExplainerMethod method);

// Batched model output: maps n rows to an n x outputs matrix.
struct ModelOutput {
  std::function<Matrix(const Matrix&)> fn;
  std::size_t outputs = 1;
};

using PredictFn = std::function<std::vector<int>(const Matrix&)>;

// Binary models expose P(class 1); multiclass models expose every class probability.
ModelOutput shap_output(const TrainedModel& model);
// Scalar anomaly score for local surrogates: P(class 1) when binary, 1 - P(class 0) otherwise.
ModelOutput lime_output(const TrainedModel& model);
PredictFn predictor(const TrainedModel& model);

struct ExplainerConfig {
  std::size_t background_size = 100;
  std::size_t shap_instances = 100;
  std::size_t lime_samples_per_instance = 1000;
  // <= 0 selects 0.75 * sqrt(p).
  double lime_kernel_width = 0.0;
  std::size_t lime_instances = 50000;
  std::size_t permutation_rounds = 10;
  std::size_t max_exact_features = 16;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ImportanceVector {
  std::vector<double> scores;
  ExplainerMethod method = ExplainerMethod::kShap;
  std::string model;
};

struct ShapMatrix {
  // values[k] holds the n x p attributions for output k.
  std::vector<Matrix> values;
  std::vector<double> base_values;
  // Model outputs on the explained instances, n x outputs.
  Matrix outputs;

  std::size_t instances() const { return values.empty() ? 0 : values.front().rows(); }
  std::size_t features() const { return values.empty() ? 0 : values.front().cols(); }
};

using RankVector = std::vector<int>;

// Seeded subsample of `rows` of at most `size` rows; all rows when smaller.
Matrix select_background(const Matrix& rows, std::size_t size, std::uint64_t seed);

ShapMatrix shap_values(const ModelOutput& model, const Matrix& instances, const Matrix& background,
                       std::size_t max_features = 16);
ImportanceVector shap_global(const ShapMatrix& m);

std::vector<double> lime_explain_instance(const ModelOutput& model,
                                          std::span<const double> instance,
                                          const ScalerParams& train_stats,
                                          const ExplainerConfig& cfg, std::size_t instance_index);
ImportanceVector lime_global(const ModelOutput& model, const Matrix& rows,
                             const ScalerParams& train_stats, const ExplainerConfig& cfg);
// Algorithm 1 aggregation: mean of absolute coefficients.
std::vector<double> average_absolute(const std::vector<std::vector<double>>& coefficients);

ImportanceVector permutation_importance(const PredictFn& predict, const Matrix& rows,
                                        std::span<const int> labels, std::size_t rounds,
                                        std::uint64_t seed);

// Ordinal ranks 1..p by descending score; exact ties go to the lower index.
RankVector to_ranks(std::span<const double> scores);

struct ImportanceRecord {
  ImportanceVector importance;
  std::vector<std::string> features;
};

void write_importance_csv(const std::filesystem::path& path,
                          const std::vector<ImportanceRecord>& records);

}  // namespace featfuse
