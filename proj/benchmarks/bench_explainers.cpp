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

#include <benchmark/benchmark.h>

#include "featfuse/explainers.hpp"

namespace {

using namespace featfuse;

Matrix gaussian(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, p);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

TrainedModel forest(std::size_t p) {
  const Matrix x = gaussian(500, p, 3);
  std::vector<int> y(500);
  for (std::size_t i = 0; i < 500; ++i) y[i] = x(i, 0) + x(i, 1) > 0 ? 1 : 0;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  RandomForestParams hp;
  hp.n_estimators = 20;
  return train(hp, Dataset::make(FeatureSchema(names, "y"), x, y), 1);
}

// One explained instance against a 20-row background; the cost grows as 2^p.
void BM_ShapExact(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const TrainedModel model = forest(p);
  const ModelOutput f = shap_output(model);
  const Matrix background = gaussian(20, p, 4);
  const Matrix instance = gaussian(1, p, 5);
  for (auto _ : state) benchmark::DoNotOptimize(shap_values(f, instance, background));
}
BENCHMARK(BM_ShapExact)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_LimeInstance(benchmark::State& state) {
  const TrainedModel model = forest(10);
  const ModelOutput f = lime_output(model);
  const Matrix rows = gaussian(1, 10, 6);
  const ScalerParams stats = fit_scaler(gaussian(100, 10, 7));
  ExplainerConfig cfg;
  std::size_t idx = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lime_explain_instance(f, rows.row(0), stats, cfg, idx++));
  }
}
BENCHMARK(BM_LimeInstance)->Unit(benchmark::kMillisecond);

void BM_Permutation(benchmark::State& state) {
  const TrainedModel model = forest(10);
  const Matrix rows = gaussian(1000, 10, 8);
  const std::vector<int> labels = model.predict(rows);
  const PredictFn predict = predictor(model);
  for (auto _ : state) benchmark::DoNotOptimize(permutation_importance(predict, rows, labels, 1, 2));
}
BENCHMARK(BM_Permutation)->Unit(benchmark::kMillisecond);

}  // namespace
