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

#include <cstdlib>
#include <fstream>
#include <set>

#include "featfuse/pipeline.hpp"

namespace featfuse {
namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::kConfig, "config: " + what);
}

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

std::vector<ModelSpec> parse_models(const nlohmann::json& list, const std::string& where) {
  if (!list.is_array()) config_error(where + " must be an array");
  std::vector<ModelSpec> out;
  for (const auto& item : list) {
    reject_unknown(item, {"family", "label", "hyperparameters"}, where + " entry");
    if (!item.contains("family")) config_error(where + " entry lacks 'family'");
    const ModelFamily family = parse_model_family(item.at("family").get<std::string>());
    ModelSpec spec;
    spec.hp = hyperparameters_from_json(family, item.value("hyperparameters", nlohmann::json()));
    spec.label = item.contains("label") ? item.at("label").get<std::string>() : model_label(spec.hp);
    out.push_back(std::move(spec));
  }
  return out;
}

nlohmann::json models_to_json(const std::vector<ModelSpec>& models) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& m : models) {
    list.push_back({{"family", std::string(to_string(family_of(m.hp)))},
                    {"label", m.label},
                    {"hyperparameters", to_json(m.hp)}});
  }
  return list;
}

std::vector<ModelSpec> default_models() {
  std::vector<ModelSpec> out;
  for (auto f : {ModelFamily::kDecisionTree, ModelFamily::kRandomForest, ModelFamily::kMlp,
                 ModelFamily::kKnn, ModelFamily::kSvmRbf, ModelFamily::kAdaBoost}) {
    Hyperparameters hp = default_hyperparameters(f);
    out.push_back({hp, model_label(hp)});
  }
  return out;
}

std::vector<ModelSpec> default_independent() {
  std::vector<ModelSpec> out;
  for (const Hyperparameters& hp :
       {Hyperparameters(gbdt_preset_defaults(GbdtPreset::kCatboostLike)),
        Hyperparameters(gbdt_preset_defaults(GbdtPreset::kLgbmLike)),
        default_hyperparameters(ModelFamily::kLogisticRegression)}) {
    out.push_back({hp, model_label(hp)});
  }
  return out;
}

}  // namespace

std::string_view toolkit_version() { return FEATFUSE_VERSION; }

std::filesystem::path default_fixtures_dir() {
  if (const char* env = std::getenv("FEATFUSE_FIXTURES")) return env;
  return FEATFUSE_DEFAULT_FIXTURES;
}

FeatureSchema DatasetSource::resolve_schema() const {
  if (kind == Kind::kSyntheticSensor || schema == "sensor") return sensor_schema();
  if (schema == "veremi") return veremi_schema();
  if (schema == "custom") {
    try {
      return FeatureSchema(features, label_column);
    } catch (const Error& e) {
      config_error(std::string("custom schema: ") + e.what());
    }
  }
  config_error("unknown schema '" + schema + "'");
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc) {
  PipelineConfig cfg;
  try {
    reject_unknown(doc,
                   {"dataset", "mode", "balance", "order", "train_fraction", "models", "explainers",
                    "fusion", "independent_classifiers", "evaluation", "seed", "output_dir",
                    "fixtures", "fixture_only", "parallel", "reference_setup"},
                   "config");
    cfg.fixture_only = doc.value("fixture_only", false);
    if (!doc.contains("seed")) config_error("'seed' is required");
    cfg.seed = doc.at("seed").get<std::uint64_t>();

    if (doc.contains("dataset")) {
      const auto& d = doc.at("dataset");
      reject_unknown(d,
                     {"source", "path", "schema", "features", "label_column", "n",
                      "anomaly_fraction", "discriminative"},
                     "dataset");
      const std::string source = d.value("source", "synthetic_sensor");
      if (source == "csv") {
        cfg.dataset.kind = DatasetSource::Kind::kCsv;
        if (!d.contains("path")) config_error("csv dataset needs 'path'");
        cfg.dataset.path = d.at("path").get<std::string>();
        cfg.dataset.schema = d.value("schema", "veremi");
        cfg.dataset.features = d.value("features", std::vector<std::string>{});
        cfg.dataset.label_column = d.value("label_column", std::string());
      } else if (source == "synthetic_sensor") {
        cfg.dataset.kind = DatasetSource::Kind::kSyntheticSensor;
        cfg.dataset.schema = "sensor";
        cfg.dataset.generator.n = d.value("n", cfg.dataset.generator.n);
        cfg.dataset.generator.anomaly_fraction =
            d.value("anomaly_fraction", cfg.dataset.generator.anomaly_fraction);
        cfg.dataset.generator.discriminative =
            d.value("discriminative", cfg.dataset.generator.discriminative);
      } else {
        config_error("unknown dataset source '" + source + "'");
      }
    } else if (!cfg.fixture_only) {
      config_error("'dataset' is required unless fixture_only is set");
    }
    cfg.dataset.generator.seed = derive_seed(cfg.seed, {fnv1a64("generate")});

    const std::string mode = doc.value("mode", "binary");
    if (mode == "binary") {
      cfg.mode = LabelMode::kBinary;
    } else if (mode == "multiclass") {
      cfg.mode = LabelMode::kMulticlass;
    } else {
      config_error("mode must be 'binary' or 'multiclass'");
    }
    cfg.balance = doc.value("balance", true);
    const std::string order = doc.value("order", "balance_then_split");
    if (order == "balance_then_split") {
      cfg.balance_before_split = true;
    } else if (order == "split_then_balance") {
      cfg.balance_before_split = false;
    } else {
      config_error("order must be 'balance_then_split' or 'split_then_balance'");
    }
    cfg.train_fraction = doc.value("train_fraction", 0.7);

    cfg.models = doc.contains("models") ? parse_models(doc.at("models"), "models") : default_models();
    cfg.independent = doc.contains("independent_classifiers")
                          ? parse_models(doc.at("independent_classifiers"), "independent_classifiers")
                          : default_independent();

    cfg.explainers = {ExplainerMethod::kShap, ExplainerMethod::kLime, ExplainerMethod::kPermutation};
    if (doc.contains("explainers")) {
      const auto& e = doc.at("explainers");
      reject_unknown(e,
                     {"methods", "background_size", "shap_instances", "lime_samples_per_instance",
                      "lime_kernel_width", "lime_instances", "permutation_rounds",
                      "max_exact_features", "max_explained_instances"},
                     "explainers");
      if (e.contains("methods")) {
        cfg.explainers.clear();
        for (const auto& m : e.at("methods")) {
          cfg.explainers.push_back(parse_explainer_method(m.get<std::string>()));
        }
      }
      auto& x = cfg.explainer;
      x.background_size = e.value("background_size", x.background_size);
      x.shap_instances = e.value("shap_instances", x.shap_instances);
      x.lime_samples_per_instance = e.value("lime_samples_per_instance", x.lime_samples_per_instance);
      x.lime_kernel_width = e.value("lime_kernel_width", x.lime_kernel_width);
      x.lime_instances = e.value("lime_instances", x.lime_instances);
      x.permutation_rounds = e.value("permutation_rounds", x.permutation_rounds);
      x.max_exact_features = e.value("max_exact_features", x.max_exact_features);
      cfg.max_explained_instances = e.value("max_explained_instances", cfg.max_explained_instances);
    }
    cfg.explainer.seed = derive_seed(cfg.seed, {fnv1a64("explain")});

    if (doc.contains("fusion")) {
      const auto& f = doc.at("fusion");
      reject_unknown(f, {"mode", "points", "top_k"}, "fusion");
      cfg.fusion.mode = parse_fusion_mode(f.value("mode", "weighted_points"));
      cfg.fusion.points = f.value("points", cfg.fusion.points);
      cfg.fusion.top_k = f.value("top_k", cfg.fusion.top_k);
    }
    if (doc.contains("evaluation")) {
      const auto& e = doc.at("evaluation");
      reject_unknown(e, {"averaging", "positive_class"}, "evaluation");
      cfg.averaging = parse_averaging(e.value("averaging", "positive_class"));
      cfg.positive_class = e.value("positive_class", 1);
    } else if (cfg.mode == LabelMode::kMulticlass) {
      cfg.averaging = Averaging::kMacro;
    }

    cfg.output_dir = doc.value("output_dir", cfg.output_dir.string());
    cfg.fixtures_dir = default_fixtures_dir();
    if (doc.contains("fixtures")) {
      const auto& f = doc.at("fixtures");
      if (f.is_boolean()) {
        cfg.fixtures_enabled = f.get<bool>();
      } else {
        reject_unknown(f, {"enabled", "dir"}, "fixtures");
        cfg.fixtures_enabled = f.value("enabled", true);
        if (f.contains("dir")) cfg.fixtures_dir = f.at("dir").get<std::string>();
      }
    }
    cfg.parallel = doc.value("parallel", false);
    if (doc.contains("reference_setup")) {
      cfg.reference_setup = doc.at("reference_setup").get<std::string>();
    } else if (cfg.dataset.schema == "sensor") {
      cfg.reference_setup = "sensor";
    } else if (cfg.dataset.schema == "veremi") {
      cfg.reference_setup = cfg.mode == LabelMode::kBinary ? "veremi_binary" : "veremi_multiclass";
    }
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("malformed value: ") + e.what());
  }
  return cfg;
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json dataset;
  if (this->dataset.kind == DatasetSource::Kind::kCsv) {
    dataset = {{"source", "csv"},
               {"path", this->dataset.path.string()},
               {"schema", this->dataset.schema}};
    if (this->dataset.schema == "custom") {
      dataset["features"] = this->dataset.features;
      dataset["label_column"] = this->dataset.label_column;
    }
  } else {
    dataset = {{"source", "synthetic_sensor"},
               {"n", this->dataset.generator.n},
               {"anomaly_fraction", this->dataset.generator.anomaly_fraction},
               {"discriminative", this->dataset.generator.discriminative}};
  }
  nlohmann::json methods = nlohmann::json::array();
  for (auto m : explainers) methods.push_back(std::string(to_string(m)));
  return {
      {"dataset", dataset},
      {"mode", mode == LabelMode::kBinary ? "binary" : "multiclass"},
      {"balance", balance},
      {"order", balance_before_split ? "balance_then_split" : "split_then_balance"},
      {"train_fraction", train_fraction},
      {"models", models_to_json(models)},
      {"explainers",
       {{"methods", methods},
        {"background_size", explainer.background_size},
        {"shap_instances", explainer.shap_instances},
        {"lime_samples_per_instance", explainer.lime_samples_per_instance},
        {"lime_kernel_width", explainer.lime_kernel_width},
        {"lime_instances", explainer.lime_instances},
        {"permutation_rounds", explainer.permutation_rounds},
        {"max_exact_features", explainer.max_exact_features},
        {"max_explained_instances", max_explained_instances}}},
      {"fusion",
       {{"mode", std::string(to_string(fusion.mode))},
        {"points", fusion.points},
        {"top_k", fusion.top_k}}},
      {"independent_classifiers", models_to_json(independent)},
      {"evaluation",
       {{"averaging", std::string(to_string(averaging))}, {"positive_class", positive_class}}},
      {"seed", seed},
      {"output_dir", output_dir.string()},
      {"fixtures", {{"enabled", fixtures_enabled}, {"dir", fixtures_dir.string()}}},
      {"fixture_only", fixture_only},
      {"parallel", parallel},
      {"reference_setup", reference_setup}};
}

// The output location does not change what is computed, so it stays out of the hash.
std::uint64_t PipelineConfig::hash() const {
  nlohmann::json doc = to_json();
  doc.erase("output_dir");
  return fnv1a64(doc.dump());
}

void PipelineConfig::validate() const {
  try {
    fusion.validate();
    if (fixture_only) {
      if (!fixtures_enabled) config_error("fixture_only requires fixtures to be enabled");
      return;
    }
    const FeatureSchema schema = dataset.resolve_schema();
    if (fusion.top_k > schema.feature_count()) {
      config_error("fusion top_k " + std::to_string(fusion.top_k) + " exceeds feature count " +
                   std::to_string(schema.feature_count()));
    }
    if (models.empty()) config_error("at least one model is required");
    if (explainers.empty()) config_error("at least one explainer is required");
    std::set<std::string> labels;
    for (const auto& m : models) {
      featfuse::validate(m.hp);
      if (!labels.insert(m.label).second) config_error("duplicate model label '" + m.label + "'");
    }
    std::set<std::string> methods;
    for (auto m : explainers) {
      if (!methods.insert(std::string(to_string(m))).second) config_error("duplicate explainer");
    }
    labels.clear();
    for (const auto& m : independent) {
      featfuse::validate(m.hp);
      if (!labels.insert(m.label).second) {
        config_error("duplicate independent classifier label '" + m.label + "'");
      }
    }
    explainer.validate();
    if (max_explained_instances == 0) config_error("max_explained_instances must be positive");
    SamplerConfig{seed, train_fraction}.validate();
    if (dataset.kind == DatasetSource::Kind::kSyntheticSensor) {
      const auto& g = dataset.generator;
      if (g.n < 10) config_error("synthetic dataset needs n >= 10");
      if (!(g.anomaly_fraction > 0.0 && g.anomaly_fraction < 1.0)) {
        config_error("anomaly_fraction must lie in (0, 1)");
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    throw Error(ErrorKind::kConfig, e.what());
  }
}

PipelineConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed,
                           std::optional<std::filesystem::path> out) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::kConfig, "config root must be an object");
  if (seed) doc["seed"] = *seed;
  if (out) doc["output_dir"] = out->string();
  PipelineConfig cfg = PipelineConfig::from_json(doc);
  // Relative dataset paths resolve against the config file location.
  if (cfg.dataset.kind == DatasetSource::Kind::kCsv && cfg.dataset.path.is_relative() &&
      !std::filesystem::exists(cfg.dataset.path)) {
    cfg.dataset.path = path.parent_path() / cfg.dataset.path;
  }
  cfg.validate();
  return cfg;
}

}  // namespace featfuse
