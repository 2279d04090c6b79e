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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "featfuse/explainers.hpp"

namespace featfuse {
namespace {

constexpr double kRidge = 1e-3;
constexpr double kMaxFailureShare = 0.10;

}  // namespace

std::vector<double> lime_explain_instance(const ModelOutput& model,
                                          std::span<const double> instance,
                                          const ScalerParams& train_stats,
                                          const ExplainerConfig& cfg, std::size_t instance_index) {
  const std::size_t p = instance.size();
  if (train_stats.sd.size() != p) {
    throw Error(ErrorKind::kExplanation, "training statistics do not match instance width");
  }
  if (model.outputs != 1) throw Error(ErrorKind::kExplanation, "LIME needs a scalar model output");
  const std::size_t n = cfg.lime_samples_per_instance;
  const double width =
      cfg.lime_kernel_width > 0.0 ? cfg.lime_kernel_width : 0.75 * std::sqrt(static_cast<double>(p));

  Rng rng(derive_seed(cfg.seed, {fnv1a64("lime"), instance_index}));
  Matrix samples(n, p);
  // Design matrix in standardized offsets; column p is the intercept.
  Eigen::MatrixXd design(n, p + 1);
  Eigen::VectorXd weight(n);
  for (std::size_t s = 0; s < n; ++s) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double sd = train_stats.sd[j];
      const double u = rng.normal();
      if (sd > 0.0) {
        samples(s, j) = instance[j] + sd * u;
        design(s, j) = u;
        dist2 += u * u;
      } else {
        samples(s, j) = instance[j];
        design(s, j) = 0.0;
      }
    }
    design(s, p) = 1.0;
    weight(s) = std::exp(-dist2 / (width * width));
  }
  const Matrix f = model.fn(samples);
  Eigen::VectorXd target(n);
  for (std::size_t s = 0; s < n; ++s) target(s) = f(s, 0);

  const Eigen::MatrixXd weighted = design.array().colwise() * weight.array();
  Eigen::MatrixXd gram = design.transpose() * weighted;
  for (std::size_t j = 0; j < p; ++j) gram(j, j) += kRidge;
  const Eigen::VectorXd rhs = weighted.transpose() * target;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw Error(ErrorKind::kExplanation, "singular LIME system");
  }
  const Eigen::VectorXd beta = ldlt.solve(rhs);
  if (!beta.allFinite()) throw Error(ErrorKind::kExplanation, "singular LIME system");
  return std::vector<double>(beta.data(), beta.data() + p);
}

std::vector<double> average_absolute(const std::vector<std::vector<double>>& coefficients) {
  if (coefficients.empty()) throw Error(ErrorKind::kExplanation, "no coefficients to average");
  std::vector<double> acc(coefficients.front().size(), 0.0);
  for (const auto& c : coefficients) {
    if (c.size() != acc.size()) throw Error(ErrorKind::kExplanation, "ragged coefficients");
    for (std::size_t j = 0; j < c.size(); ++j) acc[j] += std::abs(c[j]);
  }
  for (double& a : acc) a /= static_cast<double>(coefficients.size());
  return acc;
}

ImportanceVector lime_global(const ModelOutput& model, const Matrix& rows,
                             const ScalerParams& train_stats, const ExplainerConfig& cfg) {
  if (rows.empty()) throw Error(ErrorKind::kExplanation, "no rows to explain");
  const std::size_t count = std::min(cfg.lime_instances, rows.rows());
  std::vector<std::vector<double>> coefficients;
  coefficients.reserve(count);
  std::size_t failures = 0;
  std::string last_failure;
  for (std::size_t i = 0; i < count; ++i) {
    try {
      coefficients.push_back(lime_explain_instance(model, rows.row(i), train_stats, cfg, i));
    } catch (const Error& e) {
      ++failures;
      last_failure = e.what();
    }
  }
  if (static_cast<double>(failures) > kMaxFailureShare * static_cast<double>(count) ||
      coefficients.empty()) {
    throw Error(ErrorKind::kExplanation, std::to_string(failures) + " of " +
                                             std::to_string(count) +
                                             " LIME instances failed: " + last_failure);
  }
  ImportanceVector iv;
  iv.method = ExplainerMethod::kLime;
  iv.scores = average_absolute(coefficients);
  return iv;
}

}  // namespace featfuse
