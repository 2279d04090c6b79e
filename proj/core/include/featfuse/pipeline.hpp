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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "featfuse/data.hpp"
#include "featfuse/evaluation.hpp"
#include "featfuse/explainers.hpp"
#include "featfuse/fusion.hpp"
#include "featfuse/models.hpp"

namespace featfuse {

std::string_view toolkit_version();

struct DatasetSource {
  enum class Kind { kCsv, kSyntheticSensor };
  Kind kind = Kind::kSyntheticSensor;
  std::filesystem::path path;
  // "veremi", "sensor" or "custom" (then features + label_column are used).
  std::string schema = "sensor";
  std::vector<std::string> features;
  std::string label_column;
  SensorGeneratorConfig generator;

  FeatureSchema resolve_schema() const;
};

struct ModelSpec {
  Hyperparameters hp;
  std::string label;
};

struct PipelineConfig {
  DatasetSource dataset;
  LabelMode mode = LabelMode::kBinary;
  bool balance = true;
  bool balance_before_split = true;
  double train_fraction = 0.7;
  std::vector<ModelSpec> models;
  std::vector<ExplainerMethod> explainers;
  ExplainerConfig explainer;
  std::size_t max_explained_instances = 2000;
  FusionSpec fusion;
  std::vector<ModelSpec> independent;
  Averaging averaging = Averaging::kPositiveClass;
  int positive_class = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "featfuse_out";
  bool fixtures_enabled = true;
  std::filesystem::path fixtures_dir;
  bool fixture_only = false;
  bool parallel = false;
  // Setup whose published results are echoed as reference rows ("" for none).
  std::string reference_setup;

  static PipelineConfig from_json(const nlohmann::json& doc);
  // Canonical form; identical configs serialize to identical bytes.
  nlohmann::json to_json() const;
  // Stable across reruns; ignores output_dir.
  std::uint64_t hash() const;
  void validate() const;
};

// Reads and validates a JSON config. Seed and output overrides are applied
// before validation when given.
PipelineConfig load_config(const std::filesystem::path& path,
                           std::optional<std::uint64_t> seed = std::nullopt,
                           std::optional<std::filesystem::path> out = std::nullopt);

// Default location of the shipped rank-table fixtures.
std::filesystem::path default_fixtures_dir();

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  std::string version;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<StageTiming> timings;
  std::vector<std::string> artifacts;

  nlohmann::json to_json() const;
};

struct SubsetEvaluation {
  std::string classifier;
  // shap, lime, permutation, leveled or all.
  std::string feature_set;
  std::vector<std::string> features;
  MetricsReport metrics;
};

struct ModelSummary {
  std::string label;
  ModelFamily family = ModelFamily::kDecisionTree;
  bool warning = false;
  MetricsReport test_metrics;
};

struct PipelineArtifacts {
  std::vector<std::string> feature_names;
  nlohmann::json dataset_summary;
  std::vector<ModelSummary> models;
  MethodTables rank_tables;
  std::vector<ImportanceRecord> importances;
  std::optional<TwoLevelResult> fusion;
  std::vector<SubsetEvaluation> evaluations;
  // Fixture-only runs fuse every shipped setup.
  std::map<std::string, TwoLevelResult> fixture_fusions;
  std::optional<ConformanceReport> conformance;
  std::vector<ReferenceRow> reference;
  std::string reference_setup;
  std::size_t top_k = 0;
};

struct PipelineResult {
  RunManifest manifest;
  PipelineArtifacts artifacts;
};

// Runs every stage and writes the report files into cfg.output_dir.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// Writes all artifacts into `dir` and records them in the manifest.
void emit_report(RunManifest& manifest, const PipelineArtifacts& artifacts,
                 const std::filesystem::path& dir);

// Markdown summary rendered from the JSON documents of a finished run.
std::string render_summary(const nlohmann::json& manifest, const nlohmann::json& metrics,
                           const nlohmann::json& conformance);

// Re-renders summary.md from the JSON files in `dir`.
void rerender_summary(const std::filesystem::path& dir);

}  // namespace featfuse
