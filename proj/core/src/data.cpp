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

#include "featfuse/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace featfuse {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::optional<double> parse_real(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

int parse_label(const std::string& cell) {
  const auto value = parse_real(cell);
  if (!value || *value != std::floor(*value) || std::fabs(*value) > 1e9) return kMissingLabel;
  return static_cast<int>(*value);
}

bool row_has_missing(std::span<const double> row) {
  return std::any_of(row.begin(), row.end(), [](double v) { return std::isnan(v); });
}

std::string row_key(std::span<const double> row, int label) {
  std::string key(row.size() * sizeof(double) + sizeof(int), '\0');
  char* out = key.data();
  for (double v : row) {
    const double normalized = v == 0.0 ? 0.0 : v;  // -0.0 and 0.0 compare equal
    std::memcpy(out, &normalized, sizeof(double));
    out += sizeof(double);
  }
  std::memcpy(out, &label, sizeof(int));
  return key;
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<std::string> feature_names, std::string label_column)
    : names_(std::move(feature_names)), label_(std::move(label_column)) {
  if (names_.empty()) throw Error(ErrorKind::kData, "feature schema has no features");
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::kData, "duplicate feature name '" + name + "'");
    }
  }
  if (seen.count(label_) != 0) {
    throw Error(ErrorKind::kData, "label column '" + label_ + "' is also a feature");
  }
}

std::optional<std::size_t> FeatureSchema::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

FeatureSchema FeatureSchema::project(const std::vector<std::size_t>& columns) const {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (std::size_t c : columns) names.push_back(names_.at(c));
  return FeatureSchema(std::move(names), label_);
}

FeatureSchema veremi_schema() {
  return FeatureSchema({"pos_x", "pos_y", "pos_z", "spd_x", "spd_y", "spd_z"}, "attackerType");
}

FeatureSchema sensor_schema() {
  std::vector<std::string> names;
  for (const auto& r : sensor_ranges()) names.push_back(r.name);
  return FeatureSchema(std::move(names), "label");
}

const std::vector<int>& veremi_class_roster() {
  static const std::vector<int> roster{0, 1, 2, 4, 8, 16};
  return roster;
}

std::map<int, std::size_t> count_classes(const std::vector<int>& labels) {
  std::map<int, std::size_t> counts;
  for (int label : labels) {
    if (label != kMissingLabel) ++counts[label];
  }
  return counts;
}

Dataset Dataset::make(FeatureSchema schema, Matrix rows, std::vector<int> labels) {
  if (rows.rows() != labels.size()) {
    throw Error(ErrorKind::kData, "row count and label count differ");
  }
  if (!rows.empty() && rows.cols() != schema.feature_count()) {
    throw Error(ErrorKind::kData, "row width does not match schema");
  }
  Dataset d;
  d.schema = std::move(schema);
  d.rows = std::move(rows);
  d.labels = std::move(labels);
  d.class_counts = count_classes(d.labels);
  for (const auto& [label, count] : d.class_counts) d.roster.push_back(label);
  return d;
}

Dataset Dataset::project(const std::vector<std::string>& features) const {
  if (features.empty()) throw Error(ErrorKind::kData, "empty feature list");
  std::vector<std::size_t> columns;
  for (const auto& name : features) {
    const auto idx = schema.index_of(name);
    if (!idx) throw Error(ErrorKind::kData, "unknown feature '" + name + "'");
    columns.push_back(*idx);
  }
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  Dataset out;
  out.schema = schema.project(columns);
  out.rows = rows.select_cols(columns);
  out.labels = labels;
  out.class_counts = class_counts;
  out.roster = roster;
  return out;
}

Dataset Dataset::select(const std::vector<std::size_t>& row_indices) const {
  Dataset out;
  out.schema = schema;
  out.rows = rows.select_rows(row_indices);
  out.labels.reserve(row_indices.size());
  for (std::size_t i : row_indices) out.labels.push_back(labels[i]);
  out.class_counts = count_classes(out.labels);
  out.roster = roster;
  return out;
}

bool ScalerParams::any_constant() const {
  return std::any_of(constant.begin(), constant.end(), [](bool c) { return c; });
}

void SamplerConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::kConfig, "train_fraction must lie strictly between 0 and 1");
  }
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kData, "cannot open CSV file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kData, "CSV file is empty: " + path.string());
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> missing;
  for (const auto& name : schema.feature_names()) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      missing.push_back(name);
    } else {
      feature_cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  }
  const auto label_it = std::find(header.begin(), header.end(), schema.label_column());
  if (label_it == header.end()) missing.push_back(schema.label_column());
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::kData, "CSV header of " + path.string() + " lacks columns: " + names);
  }
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());

  Matrix rows(0, schema.feature_count());
  std::vector<int> labels;
  std::vector<double> values(schema.feature_count());
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const std::size_t c = feature_cols[j];
      const auto v = c < cells.size() ? parse_real(cells[c]) : std::nullopt;
      values[j] = v.value_or(kNaN);
    }
    rows.append_row(values);
    labels.push_back(label_col < cells.size() ? parse_label(cells[label_col]) : kMissingLabel);
  }
  if (labels.empty()) throw Error(ErrorKind::kData, "CSV file has no data rows: " + path.string());
  return Dataset::make(schema, std::move(rows), std::move(labels));
}

void write_csv(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& name : dataset.schema.feature_names()) out << name << ',';
  out << dataset.schema.label_column() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (double v : dataset.rows.row(i)) {
      if (!std::isnan(v)) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out.write(buf, res.ptr - buf);
      }
      out << ',';
    }
    if (dataset.labels[i] != kMissingLabel) out << dataset.labels[i];
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

Dataset clean(const Dataset& dataset) {
  std::vector<std::size_t> keep;
  keep.reserve(dataset.size());
  std::unordered_set<std::string> seen;
  seen.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto row = dataset.rows.row(i);
    if (dataset.labels[i] == kMissingLabel || row_has_missing(row)) continue;
    if (seen.insert(row_key(row, dataset.labels[i])).second) keep.push_back(i);
  }
  if (keep.empty()) throw Error(ErrorKind::kData, "cleaning removed every row");
  return dataset.select(keep);
}

Dataset map_labels(const Dataset& dataset, LabelMode mode) {
  const auto& roster = veremi_class_roster();
  std::vector<int> labels = dataset.labels;
  for (int& label : labels) {
    if (std::find(roster.begin(), roster.end(), label) == roster.end()) {
      throw Error(ErrorKind::kData,
                  label == kMissingLabel ? std::string("missing label (run clean first)")
                                         : "unknown raw label " + std::to_string(label));
    }
    if (mode == LabelMode::kBinary && label != 0) label = 1;
  }
  Dataset out = Dataset::make(dataset.schema, dataset.rows, std::move(labels));
  if (mode == LabelMode::kBinary) {
    out.roster = {0, 1};
  } else {
    out.roster = roster;
  }
  return out;
}

Dataset undersample(const Dataset& dataset, std::uint64_t seed) {
  if (dataset.class_counts.size() < 2) {
    throw Error(ErrorKind::kData, "under-sampling needs at least two classes");
  }
  std::size_t minority = dataset.size();
  for (const auto& [label, count] : dataset.class_counts) minority = std::min(minority, count);

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i) by_class[dataset.labels[i]].push_back(i);

  std::vector<std::size_t> keep;
  keep.reserve(minority * by_class.size());
  for (auto& [label, indices] : by_class) {
    if (indices.size() > minority) {
      Rng rng(derive_seed(seed, {fnv1a64("undersample"), static_cast<std::uint64_t>(label)}));
      rng.shuffle(std::span<std::size_t>(indices));
      indices.resize(minority);
    }
    keep.insert(keep.end(), indices.begin(), indices.end());
  }
  std::sort(keep.begin(), keep.end());
  return dataset.select(keep);
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, const SamplerConfig& cfg) {
  cfg.validate();
  if (dataset.size() < 10) {
    throw Error(ErrorKind::kData, "need at least 10 rows to split, got " +
                                      std::to_string(dataset.size()));
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i) by_class[dataset.labels[i]].push_back(i);

  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 2) {
      throw Error(ErrorKind::kData,
                  "class " + std::to_string(label) + " has fewer than 2 rows; cannot stratify");
    }
    Rng rng(derive_seed(cfg.seed, {fnv1a64("split"), static_cast<std::uint64_t>(label)}));
    rng.shuffle(std::span<std::size_t>(indices));
    const auto count = static_cast<long long>(indices.size());
    const long long wanted = std::llround(cfg.train_fraction * static_cast<double>(count));
    const auto n_train = static_cast<std::size_t>(std::clamp(wanted, 1LL, count - 1));
    train.insert(train.end(), indices.begin(), indices.begin() + n_train);
    test.insert(test.end(), indices.begin() + n_train, indices.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {dataset.select(train), dataset.select(test)};
}

ScalerParams fit_scaler(const Matrix& rows) {
  const std::size_t p = rows.cols();
  ScalerParams s;
  s.mean.assign(p, 0.0);
  s.sd.assign(p, 0.0);
  s.constant.assign(p, false);
  if (rows.empty()) throw Error(ErrorKind::kData, "cannot fit scaler on zero rows");
  const auto n = static_cast<double>(rows.rows());
  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rows.rows(); ++i) sum += rows(i, j);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      const double d = rows(i, j) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    s.mean[j] = mean;
    if (sd <= 1e-12 * std::max(1.0, std::fabs(mean))) {
      s.constant[j] = true;
    } else {
      s.sd[j] = sd;
    }
  }
  return s;
}

Matrix apply_scaler(const Matrix& rows, const ScalerParams& scaler) {
  if (rows.cols() != scaler.feature_count()) {
    throw Error(ErrorKind::kData, "scaler width does not match rows");
  }
  Matrix out = rows;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (!scaler.constant[j]) r[j] = (r[j] - scaler.mean[j]) / scaler.sd[j];
    }
  }
  return out;
}

SplitResult split_and_scale(const Dataset& dataset, const SamplerConfig& cfg) {
  auto [train, test] = stratified_split(dataset, cfg);
  ScalerParams scaler = fit_scaler(train.rows);
  train.rows = apply_scaler(train.rows, scaler);
  test.rows = apply_scaler(test.rows, scaler);
  return {std::move(train), std::move(test), std::move(scaler)};
}

const std::vector<SensorRange>& sensor_ranges() {
  static const std::vector<SensorRange> ranges{
      {"Formality", 1.0, 10.0, false},     {"Location", 0.0, 1.0, true},
      {"Frequency", 1.0, 10.0, false},     {"Speed", 50.0, 90.0, false},
      {"Correlation", 0.0, 1.0, true},     {"Lane Alignment", 1.0, 3.0, false},
      {"Headway Time", 0.3, 0.95, false},  {"Protocol", 1.0, 10000.0, false},
      {"Plausibility", 50.0, 200.0, false}, {"Consistency", 0.0, 1.0, true},
  };
  return ranges;
}

std::vector<std::string> default_discriminative_sensors() {
  return {"Location", "Correlation", "Lane Alignment", "Protocol", "Consistency"};
}

Dataset generate_sensor_dataset(const SensorGeneratorConfig& cfg) {
  if (cfg.n < 2) throw Error(ErrorKind::kConfig, "sensor generator needs n >= 2");
  if (!(cfg.anomaly_fraction > 0.0 && cfg.anomaly_fraction < 1.0)) {
    throw Error(ErrorKind::kConfig, "anomaly_fraction must lie strictly between 0 and 1");
  }
  const auto n_anomalous =
      static_cast<std::size_t>(std::llround(cfg.anomaly_fraction * static_cast<double>(cfg.n)));
  if (n_anomalous == 0 || n_anomalous >= cfg.n) {
    throw Error(ErrorKind::kConfig, "n * anomaly_fraction rounds to 0 or n");
  }

  const auto& ranges = sensor_ranges();
  const FeatureSchema schema = sensor_schema();
  std::vector<std::size_t> targets;
  for (const auto& name : cfg.discriminative) {
    const auto idx = schema.index_of(name);
    if (!idx) throw Error(ErrorKind::kConfig, "unknown sensor '" + name + "'");
    if (std::find(targets.begin(), targets.end(), *idx) == targets.end()) targets.push_back(*idx);
  }
  if (targets.empty() || targets.size() > 62) {
    throw Error(ErrorKind::kConfig, "discriminative sensor list must be nonempty");
  }

  Rng rng(derive_seed(cfg.seed, {fnv1a64("sensor")}));
  std::vector<int> labels(cfg.n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_anomalous), 1);
  rng.shuffle(std::span<int>(labels));

  Matrix rows(cfg.n, ranges.size());
  const std::uint64_t subsets = (std::uint64_t{1} << targets.size()) - 1;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    std::vector<bool> violate(ranges.size(), false);
    if (labels[i] == 1) {
      const std::uint64_t mask = 1 + rng.below(subsets);
      for (std::size_t t = 0; t < targets.size(); ++t) {
        if ((mask >> t) & 1U) violate[targets[t]] = true;
      }
    }
    auto row = rows.row(i);
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      const auto& r = ranges[j];
      if (r.binary) {
        row[j] = violate[j] ? 0.0 : 1.0;
      } else if (!violate[j]) {
        row[j] = rng.uniform(r.lo, r.hi);
      } else {
        const double width = r.hi - r.lo;
        const double offset = rng.uniform(0.1 * width, width);
        row[j] = rng.below(2) == 0 ? r.lo - offset : r.hi + offset;
      }
    }
  }
  return Dataset::make(schema, std::move(rows), std::move(labels));
}

std::size_t sensor_violations(std::span<const double> row) {
  const auto& ranges = sensor_ranges();
  std::size_t count = 0;
  for (std::size_t j = 0; j < ranges.size() && j < row.size(); ++j) {
    const auto& r = ranges[j];
    const bool ok = r.binary ? row[j] == 1.0 : (row[j] >= r.lo && row[j] <= r.hi);
    if (!ok) ++count;
  }
  return count;
}

}  // namespace featfuse
