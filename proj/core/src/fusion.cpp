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

#include "featfuse/fusion.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace featfuse {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return c != ' ' && c != '\r' && c != '\t'; };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

FusedRanking order_scores(std::vector<std::string> features, std::vector<double> scores) {
  FusedRanking out;
  out.features = std::move(features);
  out.scores = std::move(scores);
  out.ordering.resize(out.scores.size());
  std::iota(out.ordering.begin(), out.ordering.end(), std::size_t{0});
  std::stable_sort(out.ordering.begin(), out.ordering.end(), [&out](std::size_t a, std::size_t b) {
    return out.scores[a] > out.scores[b];
  });
  for (std::size_t i = 0; i < out.ordering.size();) {
    std::size_t j = i + 1;
    while (j < out.ordering.size() && out.scores[out.ordering[j]] == out.scores[out.ordering[i]]) {
      ++j;
    }
    if (j - i > 1) out.tie_groups.emplace_back(out.ordering.begin() + i, out.ordering.begin() + j);
    i = j;
  }
  return out;
}

}  // namespace

void validate(const RankTable& table) {
  const std::size_t p = table.feature_count();
  if (p == 0) throw Error(ErrorKind::kFusion, "rank table has no features");
  if (table.source_count() == 0) throw Error(ErrorKind::kFusion, "rank table has no sources");
  if (table.ranks.size() != table.source_count()) {
    throw Error(ErrorKind::kFusion, "rank table column count mismatch");
  }
  std::vector<std::string> names = table.features;
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw Error(ErrorKind::kFusion, "duplicate feature names in rank table");
  }
  for (std::size_t s = 0; s < table.source_count(); ++s) {
    const auto& col = table.ranks[s];
    if (col.size() != p) {
      throw Error(ErrorKind::kFusion, "column '" + table.sources[s] + "' has wrong length");
    }
    for (int r : col) {
      if (r < 1 || static_cast<std::size_t>(r) > p) {
        throw Error(ErrorKind::kFusion, "column '" + table.sources[s] + "' holds rank " +
                                            std::to_string(r) + " outside 1.." +
                                            std::to_string(p));
      }
    }
  }
}

bool is_strict(const RankTable& table) {
  for (const auto& col : table.ranks) {
    std::vector<int> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != static_cast<int>(i + 1)) return false;
    }
  }
  return true;
}

RankTable read_rank_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open rank table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kFusion, "empty rank table " + path.string());
  auto header = split_csv_line(line);
  if (header.size() < 2 || trim(header[0]) != "feature") {
    throw Error(ErrorKind::kFusion, "rank table header must start with 'feature': " + path.string());
  }
  RankTable table;
  for (std::size_t c = 1; c < header.size(); ++c) table.sources.push_back(trim(header[c]));
  table.ranks.resize(table.sources.size());
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::kFusion, "ragged row in " + path.string() + ": " + line);
    }
    table.features.push_back(trim(cells[0]));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      int value = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw Error(ErrorKind::kFusion, "non-integer rank '" + cell + "' in " + path.string());
      }
      table.ranks[c - 1].push_back(value);
    }
  }
  validate(table);
  return table;
}

void write_rank_table(const std::filesystem::path& path, const RankTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "feature";
  for (const auto& s : table.sources) out << ',' << s;
  out << '\n';
  for (std::size_t f = 0; f < table.feature_count(); ++f) {
    out << table.features[f];
    for (std::size_t s = 0; s < table.source_count(); ++s) out << ',' << table.ranks[s][f];
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

std::string_view to_string(FusionMode mode) {
  return mode == FusionMode::kWeightedPoints ? "weighted_points" : "mean_rank";
}

FusionMode parse_fusion_mode(std::string_view name) {
  if (name == "weighted_points") return FusionMode::kWeightedPoints;
  if (name == "mean_rank") return FusionMode::kMeanRank;
  throw Error(ErrorKind::kConfig, "unknown fusion mode '" + std::string(name) + "'");
}

void FusionSpec::validate(std::size_t p) const {
  if (mode == FusionMode::kWeightedPoints && points.empty()) {
    throw Error(ErrorKind::kConfig, "fusion points must not be empty");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i] >= 0.0)) throw Error(ErrorKind::kConfig, "fusion points must be non-negative");
    if (i > 0 && points[i] > points[i - 1]) {
      throw Error(ErrorKind::kConfig, "fusion points must be non-increasing");
    }
  }
  if (top_k == 0) throw Error(ErrorKind::kConfig, "top_k must be positive");
  if (p > 0 && top_k > p) {
    throw Error(ErrorKind::kConfig, "top_k " + std::to_string(top_k) + " exceeds feature count " +
                                        std::to_string(p));
  }
}

std::vector<int> FusedRanking::ranks() const {
  std::vector<int> out(ordering.size());
  for (std::size_t r = 0; r < ordering.size(); ++r) out[ordering[r]] = static_cast<int>(r + 1);
  return out;
}

FusedRanking fuse_ranks(const RankTable& table, const FusionSpec& spec) {
  validate(table);
  spec.validate();
  const std::size_t p = table.feature_count();
  std::vector<double> scores(p, 0.0);
  if (spec.mode == FusionMode::kWeightedPoints) {
    for (const auto& col : table.ranks) {
      for (std::size_t f = 0; f < p; ++f) {
        const auto place = static_cast<std::size_t>(col[f] - 1);
        if (place < spec.points.size()) scores[f] += spec.points[place];
      }
    }
  } else {
    for (std::size_t f = 0; f < p; ++f) {
      double sum = 0.0;
      for (const auto& col : table.ranks) sum += col[f];
      scores[f] = static_cast<double>(p + 1) - sum / static_cast<double>(table.source_count());
    }
  }
  return order_scores(table.features, std::move(scores));
}

const FusedRanking& TwoLevelResult::method(std::string_view name) const {
  for (const auto& [m, fused] : per_method) {
    if (m == name) return fused;
  }
  throw Error(ErrorKind::kFusion, "no fused ranking for method '" + std::string(name) + "'");
}

TwoLevelResult two_level_fuse(const MethodTables& tables, const FusionSpec& spec) {
  if (tables.empty()) throw Error(ErrorKind::kFusion, "no rank tables to fuse");
  const auto& roster = tables.front().second.features;
  TwoLevelResult out;
  out.level2.features = roster;
  for (const auto& [method, table] : tables) {
    if (table.features != roster) {
      throw Error(ErrorKind::kFusion, "feature roster of '" + method + "' does not match");
    }
    FusedRanking fused = fuse_ranks(table, spec);
    out.level2.sources.push_back(method);
    out.level2.ranks.push_back(fused.ranks());
    out.per_method.emplace_back(method, std::move(fused));
  }
  out.leveled = fuse_ranks(out.level2, spec);
  return out;
}

std::vector<TopKEntry> top_k(const FusedRanking& fused, std::size_t k) {
  if (k > fused.ordering.size()) {
    throw Error(ErrorKind::kFusion, "top_k " + std::to_string(k) + " exceeds feature count " +
                                        std::to_string(fused.ordering.size()));
  }
  std::vector<TopKEntry> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t f = fused.ordering[r];
    out.push_back({f, fused.features[f], fused.scores[f], fused.scores[f] == 0.0});
  }
  return out;
}

std::vector<std::string> top_k_names(const FusedRanking& fused, std::size_t k) {
  std::vector<std::string> names;
  for (const auto& e : top_k(fused, k)) names.push_back(e.feature);
  return names;
}

void write_fused_csv(const std::filesystem::path& path, const FusedRanking& fused) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "feature,score,rank,flagged\n";
  for (std::size_t r = 0; r < fused.ordering.size(); ++r) {
    const std::size_t f = fused.ordering[r];
    out << fused.features[f] << ',' << format_number(fused.scores[f]) << ',' << r + 1 << ','
        << (fused.scores[f] == 0.0 ? "true" : "false") << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace featfuse
