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
#include <bit>
#include <cmath>
#include <numeric>

#include "featfuse/explainers.hpp"

namespace featfuse {
namespace {

constexpr std::size_t kMaxBatchRows = std::size_t{1} << 16;

// w[s] = s! (p - s - 1)! / p! for coalitions of size s not containing the feature.
std::vector<double> shapley_weights(std::size_t p) {
  std::vector<double> fact(p + 1, 1.0);
  for (std::size_t i = 1; i <= p; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
  std::vector<double> w(p);
  for (std::size_t s = 0; s < p; ++s) w[s] = fact[s] * fact[p - s - 1] / fact[p];
  return w;
}

}  // namespace

Matrix select_background(const Matrix& rows, std::size_t size, std::uint64_t seed) {
  if (rows.empty()) throw Error(ErrorKind::kExplanation, "background source is empty");
  if (size == 0) throw Error(ErrorKind::kExplanation, "background size must be positive");
  if (rows.rows() <= size) return rows;
  std::vector<std::size_t> idx(rows.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(seed, {fnv1a64("background")}));
  rng.shuffle(std::span<std::size_t>(idx));
  idx.resize(size);
  std::sort(idx.begin(), idx.end());
  return rows.select_rows(idx);
}

ShapMatrix shap_values(const ModelOutput& model, const Matrix& instances, const Matrix& background,
                       std::size_t max_features) {
  if (background.empty()) throw Error(ErrorKind::kExplanation, "empty SHAP background");
  const std::size_t p = background.cols();
  if (p == 0) throw Error(ErrorKind::kExplanation, "no features to explain");
  if (p > max_features) {
    throw Error(ErrorKind::kExplanation, "exact Shapley enumeration capped at " +
                                             std::to_string(max_features) + " features, got " +
                                             std::to_string(p));
  }
  if (!instances.empty() && instances.cols() != p) {
    throw Error(ErrorKind::kExplanation, "instance width does not match background");
  }
  const std::size_t n = instances.rows();
  const std::size_t bg = background.rows();
  const std::size_t m = model.outputs;
  const std::size_t coalitions = std::size_t{1} << p;
  const std::vector<double> weights = shapley_weights(p);

  ShapMatrix out;
  out.values.assign(m, Matrix(n, p));
  out.base_values.assign(m, 0.0);
  out.outputs = n > 0 ? model.fn(instances) : Matrix(0, m);

  // The empty coalition does not depend on the instance.
  {
    const Matrix f = model.fn(background);
    for (std::size_t k = 0; k < m; ++k) {
      double acc = 0.0;
      for (std::size_t b = 0; b < bg; ++b) acc += f(b, k);
      out.base_values[k] = acc / static_cast<double>(bg);
    }
  }

  const std::size_t masks_per_batch = std::max<std::size_t>(1, kMaxBatchRows / bg);
  std::vector<double> v(coalitions * m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = instances.row(i);
    for (std::size_t first = 0; first < coalitions; first += masks_per_batch) {
      const std::size_t last = std::min(coalitions, first + masks_per_batch);
      Matrix hybrid((last - first) * bg, p);
      std::size_t r = 0;
      for (std::size_t mask = first; mask < last; ++mask) {
        for (std::size_t b = 0; b < bg; ++b, ++r) {
          const auto src = background.row(b);
          auto dst = hybrid.row(r);
          for (std::size_t j = 0; j < p; ++j) dst[j] = (mask >> j & 1U) ? x[j] : src[j];
        }
      }
      const Matrix f = model.fn(hybrid);
      r = 0;
      for (std::size_t mask = first; mask < last; ++mask) {
        for (std::size_t k = 0; k < m; ++k) {
          double acc = 0.0;
          for (std::size_t b = 0; b < bg; ++b) acc += f(r + b, k);
          v[mask * m + k] = acc / static_cast<double>(bg);
        }
        r += bg;
      }
    }
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t bit = std::size_t{1} << j;
      for (std::size_t k = 0; k < m; ++k) {
        double phi = 0.0;
        for (std::size_t mask = 0; mask < coalitions; ++mask) {
          if (mask & bit) continue;
          const auto size = static_cast<std::size_t>(std::popcount(mask));
          phi += weights[size] * (v[(mask | bit) * m + k] - v[mask * m + k]);
        }
        out.values[k](i, j) = phi;
      }
    }
  }
  return out;
}

ImportanceVector shap_global(const ShapMatrix& m) {
  if (m.values.empty() || m.instances() == 0) {
    throw Error(ErrorKind::kExplanation, "empty SHAP matrix");
  }
  const std::size_t p = m.features();
  ImportanceVector iv;
  iv.method = ExplainerMethod::kShap;
  iv.scores.assign(p, 0.0);
  for (const Matrix& slice : m.values) {
    for (std::size_t i = 0; i < slice.rows(); ++i) {
      for (std::size_t j = 0; j < p; ++j) iv.scores[j] += std::abs(slice(i, j));
    }
  }
  const double count = static_cast<double>(m.values.size() * m.instances());
  for (double& s : iv.scores) s /= count;
  return iv;
}

}  // namespace featfuse
