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
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "featfuse/common.hpp"

namespace featfuse {

// Label value recorded for rows whose label cell was empty or unparsable.
inline constexpr int kMissingLabel = std::numeric_limits<int>::min();

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws Error(kData) if names repeat, the list is empty, or the label
  // column collides with a feature name.
  FeatureSchema(std::vector<std::string> feature_names, std::string label_column);

  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  std::size_t feature_count() const noexcept { return names_.size(); }
  const std::string& label_column() const noexcept { return label_; }

  // Column index of a feature name, or nullopt.
  std::optional<std::size_t> index_of(const std::string& name) const;

  // Schema restricted to the given column indices, in the given order.
  FeatureSchema project(const std::vector<std::size_t>& columns) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<std::string> names_;
  std::string label_;
};

// pos_x, pos_y, pos_z, spd_x, spd_y, spd_z with label column attackerType.
FeatureSchema veremi_schema();
// The ten on-board sensor checks with label column "label".
FeatureSchema sensor_schema();

// VeReMi attacker-type ids: 0 benign, 1 constant, 2 constant offset,
// 4 random, 8 random offset, 16 eventual stop.
const std::vector<int>& veremi_class_roster();

struct Dataset {
  FeatureSchema schema;
  Matrix rows;
  std::vector<int> labels;
  // Counts per labelled class (rows carrying kMissingLabel are not counted).
  std::map<int, std::size_t> class_counts;
  // Known class ids; may include classes with zero rows.
  std::vector<int> roster;

  std::size_t size() const noexcept { return labels.size(); }

  // Builds a dataset and fills class_counts/roster from the labels.
  static Dataset make(FeatureSchema schema, Matrix rows, std::vector<int> labels);

  // Same rows and labels restricted to the named features, in schema order
  // regardless of the order of `features`.
  Dataset project(const std::vector<std::string>& features) const;

  Dataset select(const std::vector<std::size_t>& row_indices) const;
};

std::map<int, std::size_t> count_classes(const std::vector<int>& labels);

enum class LabelMode { kBinary, kMulticlass };

struct ScalerParams {
  std::vector<double> mean;
  std::vector<double> sd;
  // Columns with zero spread; they pass through unscaled.
  std::vector<bool> constant;

  std::size_t feature_count() const noexcept { return mean.size(); }
  bool any_constant() const;
};

struct SamplerConfig {
  std::uint64_t seed = 0;
  double train_fraction = 0.7;

  void validate() const;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  ScalerParams scaler;
};

// Reads a UTF-8 comma-separated file whose header holds every schema feature
// and the label column (any order; extra columns are ignored). Empty or
// unparsable cells become NaN (features) or kMissingLabel (label).
Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema);

// Writes header + rows in schema order, label last. NaN cells are written empty.
void write_csv(const std::filesystem::path& path, const Dataset& dataset);

// Drops rows containing a missing cell and repeated (row, label) pairs,
// keeping the first occurrence and the survivors' order.
Dataset clean(const Dataset& dataset);

Dataset map_labels(const Dataset& dataset, LabelMode mode);

// Random under-sampling of every class down to the minority count.
Dataset undersample(const Dataset& dataset, std::uint64_t seed);

// Stratified, seeded split. Each class contributes round(fraction * count)
// rows to train, clamped so both partitions keep at least one row.
std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, const SamplerConfig& cfg);

// Population mean/sd per column.
ScalerParams fit_scaler(const Matrix& rows);
Matrix apply_scaler(const Matrix& rows, const ScalerParams& scaler);

SplitResult split_and_scale(const Dataset& dataset, const SamplerConfig& cfg);

// Normal operating range of one sensor check.
struct SensorRange {
  std::string name;
  double lo;
  double hi;
  // Binary checks pass with value 1 and fail with value 0.
  bool binary;
};

const std::vector<SensorRange>& sensor_ranges();

// Default set of checks that anomalous rows may fail.
std::vector<std::string> default_discriminative_sensors();

struct SensorGeneratorConfig {
  std::size_t n = 10000;
  double anomaly_fraction = 0.5;
  std::uint64_t seed = 0;
  // Names of the checks an anomalous row may fail; each anomalous row fails
  // a uniformly drawn nonempty subset of them.
  std::vector<std::string> discriminative = default_discriminative_sensors();
};

Dataset generate_sensor_dataset(const SensorGeneratorConfig& cfg);

// Number of sensor range checks the row fails.
std::size_t sensor_violations(std::span<const double> row);

}  // namespace featfuse
