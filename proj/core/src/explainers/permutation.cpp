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

#include "featfuse/explainers.hpp"

namespace featfuse {
namespace {

double accuracy(const std::vector<int>& predicted, std::span<const int> labels) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace

ImportanceVector permutation_importance(const PredictFn& predict, const Matrix& rows,
                                        std::span<const int> labels, std::size_t rounds,
                                        std::uint64_t seed) {
  if (rows.empty()) throw Error(ErrorKind::kExplanation, "no rows for permutation importance");
  if (labels.size() != rows.rows()) {
    throw Error(ErrorKind::kExplanation, "labels and rows differ in length");
  }
  if (rounds == 0) throw Error(ErrorKind::kExplanation, "permutation rounds must be positive");
  const std::size_t p = rows.cols();
  const std::size_t n = rows.rows();
  const double baseline = accuracy(predict(rows), labels);

  ImportanceVector iv;
  iv.method = ExplainerMethod::kPermutation;
  iv.scores.assign(p, 0.0);
  Matrix shuffled = rows;
  std::vector<double> column(n);
  for (std::size_t j = 0; j < p; ++j) {
    double drop = 0.0;
    for (std::size_t r = 0; r < rounds; ++r) {
      for (std::size_t i = 0; i < n; ++i) column[i] = rows(i, j);
      Rng rng(derive_seed(seed, {fnv1a64("permutation"), j, r}));
      rng.shuffle(std::span<double>(column));
      for (std::size_t i = 0; i < n; ++i) shuffled(i, j) = column[i];
      drop += baseline - accuracy(predict(shuffled), labels);
    }
    for (std::size_t i = 0; i < n; ++i) shuffled(i, j) = rows(i, j);
    iv.scores[j] = std::max(0.0, drop / static_cast<double>(rounds));
  }
  return iv;
}

}  // namespace featfuse
