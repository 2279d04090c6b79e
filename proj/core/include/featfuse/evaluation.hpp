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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "featfuse/data.hpp"
#include "featfuse/fusion.hpp"
#include "featfuse/models.hpp"

namespace featfuse {

// Rows are true classes, columns predicted classes, both in roster order.
struct ConfusionMatrix {
  std::vector<int> roster;
  std::vector<std::size_t> counts;

  std::size_t classes() const noexcept { return roster.size(); }
  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * roster.size() + predicted];
  }
  std::size_t total() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 const std::vector<int>& roster);
// Builds a matrix directly from counts (row-major, rows = truth).
ConfusionMatrix confusion_matrix_from_counts(const std::vector<int>& roster,
                                             const std::vector<std::vector<std::size_t>>& counts);

enum class Averaging { kPositiveClass, kMacro, kMicro };

std::string_view to_string(Averaging averaging);
Averaging parse_averaging(std::string_view name);

struct ClassMetrics {
  int label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  // Set when the denominator was zero and the value was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct MetricsReport {
  Averaging averaging = Averaging::kPositiveClass;
  int positive_class = 1;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Any aggregate value relied on a zero-denominator fallback.
  bool zero_division = false;
  std::vector<ClassMetrics> per_class;
  ConfusionMatrix confusion;

  nlohmann::json to_json() const;
};

MetricsReport classification_metrics(const ConfusionMatrix& cm, Averaging averaging,
                                     int positive_class = 1);

// Trains on the named columns of `train` and scores on the same columns of `test`.
MetricsReport evaluate_feature_subset(const Dataset& train, const Dataset& test,
                                      const std::vector<std::string>& features,
                                      const Hyperparameters& hp, std::uint64_t seed,
                                      Averaging averaging = Averaging::kPositiveClass,
                                      int positive_class = 1);

// ---- Conformance against the shipped published tables ----

inline constexpr std::string_view kLeveledColumn = "leveled";

struct ReferenceRow {
  std::string setup;
  std::string classifier;
  std::string metric;
  // SHAP, LIME, DALEX, Leveled.
  std::vector<double> values;
};

struct Fixtures {
  std::filesystem::path dir;
  // setup -> per-method rank tables in shap, lime, permutation order.
  std::map<std::string, MethodTables> tables;
  // setup -> column -> published top features.
  std::map<std::string, std::map<std::string, std::vector<std::string>>> combined;
  std::vector<ReferenceRow> reference;
};

const std::vector<std::string>& fixture_setups();
const std::vector<std::string>& fixture_methods();
// Published k for a setup: 4 for VeReMi, 5 for Sensor.
std::size_t fixture_top_k(std::string_view setup);

Fixtures load_fixtures(const std::filesystem::path& dir);

enum class Verdict { kExactOrderMatch, kSetMatch, kMismatch };
std::string_view to_string(Verdict verdict);

enum class CheckKind { kSet, kOrder, kNonzeroPrefixOrder };
std::string_view to_string(CheckKind kind);

struct ConformanceCell {
  std::string setup;
  std::string column;
  CheckKind kind = CheckKind::kSet;
  bool required = false;
  std::vector<std::string> expected;
  std::vector<std::string> computed;
  Verdict verdict = Verdict::kMismatch;
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  std::string note;

  bool passed() const;
};

struct ConformanceReport {
  std::vector<ConformanceCell> cells;

  bool passed() const;
  const ConformanceCell* find(std::string_view setup, std::string_view column) const;
  nlohmann::json to_json() const;
  static ConformanceReport from_json(const nlohmann::json& doc);
  std::string to_markdown() const;
};

// Fuses every fixture setup with `spec` (top_k taken per setup).
std::map<std::string, TwoLevelResult> fuse_fixtures(const Fixtures& fixtures,
                                                    const FusionSpec& spec);

ConformanceReport conformance_check(const std::map<std::string, TwoLevelResult>& computed,
                                    const Fixtures& fixtures);

}  // namespace featfuse
