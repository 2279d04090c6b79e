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
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "featfuse/common.hpp"

namespace featfuse {

// Features x sources matrix of ordinal ranks.
struct RankTable {
  std::vector<std::string> features;
  std::vector<std::string> sources;
  // ranks[s][f]: rank of feature f in source s.
  std::vector<std::vector<int>> ranks;

  std::size_t feature_count() const noexcept { return features.size(); }
  std::size_t source_count() const noexcept { return sources.size(); }
  int rank(std::size_t feature, std::size_t source) const { return ranks[source][feature]; }
};

// Throws a fusion error unless every column holds integers in 1..p. Columns
// that repeat a rank are accepted; each repeated place is counted as written.
void validate(const RankTable& table);
// True when every column is a permutation of 1..p.
bool is_strict(const RankTable& table);

// CSV with header "feature,<source>,..." and one row per feature.
RankTable read_rank_table(const std::filesystem::path& path);
void write_rank_table(const std::filesystem::path& path, const RankTable& table);

enum class FusionMode { kWeightedPoints, kMeanRank };

std::string_view to_string(FusionMode mode);
FusionMode parse_fusion_mode(std::string_view name);

struct FusionSpec {
  std::vector<double> points{3.0, 2.0, 1.0};
  FusionMode mode = FusionMode::kWeightedPoints;
  std::size_t top_k = 4;

  // Checks the points vector and, when p > 0, top_k <= p.
  void validate(std::size_t p = 0) const;
};

struct FusedRanking {
  std::vector<std::string> features;
  std::vector<double> scores;
  // Feature indices by descending score, ties by lower index.
  std::vector<std::size_t> ordering;
  // Groups of two or more features sharing a score, in ordering order.
  std::vector<std::vector<std::size_t>> tie_groups;

  // Ordinal rank (1-based) of each feature under `ordering`.
  std::vector<int> ranks() const;
};

FusedRanking fuse_ranks(const RankTable& table, const FusionSpec& spec);

using MethodTables = std::vector<std::pair<std::string, RankTable>>;

struct TwoLevelResult {
  std::vector<std::pair<std::string, FusedRanking>> per_method;
  // Level-2 input: one column per method, holding that method's fused ranks.
  RankTable level2;
  FusedRanking leveled;

  const FusedRanking& method(std::string_view name) const;
};

TwoLevelResult two_level_fuse(const MethodTables& tables, const FusionSpec& spec);

struct TopKEntry {
  std::size_t index = 0;
  std::string feature;
  double score = 0.0;
  // Zero score: the position was filled by index order, not by signal.
  bool flagged = false;
};

std::vector<TopKEntry> top_k(const FusedRanking& fused, std::size_t k);
std::vector<std::string> top_k_names(const FusedRanking& fused, std::size_t k);

// CSV {feature, score, rank, flagged} in ordering order.
void write_fused_csv(const std::filesystem::path& path, const FusedRanking& fused);

}  // namespace featfuse
