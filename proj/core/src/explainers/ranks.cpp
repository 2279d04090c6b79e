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
#include <fstream>
#include <numeric>

#include "featfuse/explainers.hpp"

namespace featfuse {

std::string_view to_string(ExplainerMethod method) {
  switch (method) {
    case ExplainerMethod::kShap:
      return "shap";
    case ExplainerMethod::kLime:
      return "lime";
    case ExplainerMethod::kPermutation:
      return "permutation";
  }
  return "unknown";
}

ExplainerMethod parse_explainer_method(std::string_view name) {
  if (name == "shap") return ExplainerMethod::kShap;
  if (name == "lime") return ExplainerMethod::kLime;
  if (name == "permutation" || name == "dalex") return ExplainerMethod::kPermutation;
  throw Error(ErrorKind::kConfig, "unknown explainer '" + std::string(name) + "'");
}

std::string_view display_name(ExplainerMethod method) {
  switch (method) {
    case ExplainerMethod::kShap:
      return "SHAP";
    case ExplainerMethod::kLime:
      return "LIME";
    case ExplainerMethod::kPermutation:
      return "DALEX";
  }
  return "unknown";
}

void ExplainerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::kConfig, std::string("invalid explainer config: ") + what);
  };
  require(background_size > 0, "background_size must be positive");
  require(shap_instances > 0, "shap_instances must be positive");
  require(lime_samples_per_instance > 0, "lime_samples_per_instance must be positive");
  require(lime_instances > 0, "lime_instances must be positive");
  require(permutation_rounds > 0, "permutation_rounds must be positive");
  require(lime_kernel_width >= 0.0, "lime_kernel_width must be positive (0 = default)");
  require(max_exact_features > 0 && max_exact_features <= 24, "max_exact_features in [1, 24]");
}

ModelOutput shap_output(const TrainedModel& model) {
  const std::size_t k = model.classes().size();
  if (k == 2) {
    return {[&model](const Matrix& rows) {
              const Matrix proba = model.predict_proba(rows);
              Matrix out(proba.rows(), 1);
              for (std::size_t i = 0; i < proba.rows(); ++i) out(i, 0) = proba(i, 1);
              return out;
            },
            1};
  }
  return {[&model](const Matrix& rows) { return model.predict_proba(rows); }, k};
}

ModelOutput lime_output(const TrainedModel& model) {
  const bool binary = model.classes().size() == 2;
  return {[&model, binary](const Matrix& rows) {
            const Matrix proba = model.predict_proba(rows);
            Matrix out(proba.rows(), 1);
            for (std::size_t i = 0; i < proba.rows(); ++i) {
              out(i, 0) = binary ? proba(i, 1) : 1.0 - proba(i, 0);
            }
            return out;
          },
          1};
}

PredictFn predictor(const TrainedModel& model) {
  return [&model](const Matrix& rows) { return model.predict(rows); };
}

RankVector to_ranks(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RankVector ranks(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r + 1);
  return ranks;
}

void write_importance_csv(const std::filesystem::path& path,
                          const std::vector<ImportanceRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "feature,score,rank,method,model\n";
  for (const auto& rec : records) {
    const RankVector ranks = to_ranks(rec.importance.scores);
    for (std::size_t j = 0; j < rec.features.size(); ++j) {
      out << rec.features[j] << ',' << format_number(rec.importance.scores[j]) << ',' << ranks[j]
          << ',' << to_string(rec.importance.method) << ',' << rec.importance.model << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace featfuse
