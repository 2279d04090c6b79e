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

#include "featfuse/data.hpp"
#include "featfuse/models.hpp"

namespace {

using namespace featfuse;

const Dataset& sensor_train() {
  static const Dataset d = [] {
    SensorGeneratorConfig cfg;
    cfg.n = 4000;
    cfg.seed = 1;
    return split_and_scale(generate_sensor_dataset(cfg), {1, 0.7}).train;
  }();
  return d;
}

void BM_Train(benchmark::State& state) {
  const auto family = static_cast<ModelFamily>(state.range(0));
  const Hyperparameters hp = default_hyperparameters(family);
  state.SetLabel(model_label(hp));
  for (auto _ : state) benchmark::DoNotOptimize(train(hp, sensor_train(), 3));
}
BENCHMARK(BM_Train)
    ->DenseRange(static_cast<int>(ModelFamily::kDecisionTree), static_cast<int>(ModelFamily::kGbdt))
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

void BM_PredictForest(benchmark::State& state) {
  const TrainedModel model = train(RandomForestParams{}, sensor_train(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_proba(sensor_train().rows));
}
BENCHMARK(BM_PredictForest)->Unit(benchmark::kMillisecond);

void BM_GenerateSensor(benchmark::State& state) {
  SensorGeneratorConfig cfg;
  cfg.n = 10000;
  for (auto _ : state) benchmark::DoNotOptimize(generate_sensor_dataset(cfg));
}
BENCHMARK(BM_GenerateSensor)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
