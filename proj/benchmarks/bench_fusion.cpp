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

#include <numeric>

#include "featfuse/fusion.hpp"

namespace {

using namespace featfuse;

RankTable random_table(std::size_t p, std::size_t sources, std::uint64_t seed) {
  Rng rng(seed);
  RankTable t;
  for (std::size_t f = 0; f < p; ++f) t.features.push_back("f" + std::to_string(f));
  for (std::size_t s = 0; s < sources; ++s) {
    t.sources.push_back("s" + std::to_string(s));
    std::vector<int> col(p);
    std::iota(col.begin(), col.end(), 1);
    rng.shuffle(std::span<int>(col));
    t.ranks.push_back(col);
  }
  return t;
}

void BM_FuseRanks(benchmark::State& state) {
  const RankTable t = random_table(static_cast<std::size_t>(state.range(0)), 6, 1);
  FusionSpec spec;
  spec.top_k = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fuse_ranks(t, spec));
}
BENCHMARK(BM_FuseRanks)->Arg(6)->Arg(10)->Arg(100);

void BM_TwoLevelFixtures(benchmark::State& state) {
  MethodTables tables;
  for (const char* m : {"shap", "lime", "permutation"}) {
    tables.emplace_back(m, read_rank_table(std::string(FEATFUSE_BENCH_FIXTURES) +
                                           "/ranks_veremi_binary_" + m + ".csv"));
  }
  for (auto _ : state) benchmark::DoNotOptimize(two_level_fuse(tables, FusionSpec{}));
}
BENCHMARK(BM_TwoLevelFixtures);

}  // namespace
