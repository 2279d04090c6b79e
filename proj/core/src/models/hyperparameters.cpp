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

#include <string>

#include "featfuse/models.hpp"

namespace featfuse {
namespace {

template <typename T>
void read_if(const nlohmann::json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kConfig, "invalid hyperparameter: " + what);
}

bool rate_ok(double r) { return r > 0.0 && r <= 1.0; }

}  // namespace

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::kDecisionTree:
      return "decision_tree";
    case ModelFamily::kRandomForest:
      return "random_forest";
    case ModelFamily::kKnn:
      return "knn";
    case ModelFamily::kSvmRbf:
      return "svm_rbf";
    case ModelFamily::kAdaBoost:
      return "adaboost";
    case ModelFamily::kMlp:
      return "mlp";
    case ModelFamily::kLogisticRegression:
      return "logistic_regression";
    case ModelFamily::kGbdt:
      return "gbdt";
  }
  return "unknown";
}

ModelFamily parse_model_family(std::string_view name) {
  for (auto f : {ModelFamily::kDecisionTree, ModelFamily::kRandomForest, ModelFamily::kKnn,
                 ModelFamily::kSvmRbf, ModelFamily::kAdaBoost, ModelFamily::kMlp,
                 ModelFamily::kLogisticRegression, ModelFamily::kGbdt}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorKind::kConfig, "unknown model family '" + std::string(name) + "'");
}

std::string_view to_string(GbdtPreset preset) {
  return preset == GbdtPreset::kLgbmLike ? "lgbm_like" : "catboost_like";
}

GbdtPreset parse_gbdt_preset(std::string_view name) {
  if (name == "lgbm_like") return GbdtPreset::kLgbmLike;
  if (name == "catboost_like") return GbdtPreset::kCatboostLike;
  throw Error(ErrorKind::kConfig, "unknown GBDT preset '" + std::string(name) + "'");
}

GbdtParams gbdt_preset_defaults(GbdtPreset preset) {
  GbdtParams p;
  p.preset = preset;
  if (preset == GbdtPreset::kCatboostLike) {
    // Symmetric-depth style defaults: shallower trees, more rounds, L2 = 3.
    p.n_estimators = 300;
    p.max_depth = 6;
    p.min_samples_leaf = 1;
    p.l2 = 3.0;
  }
  return p;
}

ModelFamily family_of(const Hyperparameters& hp) {
  return static_cast<ModelFamily>(hp.index());
}

Hyperparameters default_hyperparameters(ModelFamily family, GbdtPreset preset) {
  switch (family) {
    case ModelFamily::kDecisionTree:
      return DecisionTreeParams{};
    case ModelFamily::kRandomForest:
      return RandomForestParams{};
    case ModelFamily::kKnn:
      return KnnParams{};
    case ModelFamily::kSvmRbf:
      return SvmParams{};
    case ModelFamily::kAdaBoost:
      return AdaBoostParams{};
    case ModelFamily::kMlp:
      return MlpParams{};
    case ModelFamily::kLogisticRegression:
      return LogisticParams{};
    case ModelFamily::kGbdt:
      return gbdt_preset_defaults(preset);
  }
  throw Error(ErrorKind::kConfig, "unknown model family");
}

void validate(const Hyperparameters& hp) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DecisionTreeParams>) {
          require(p.max_depth >= 1, "max_depth >= 1");
          require(p.min_samples_leaf >= 1, "min_samples_leaf >= 1");
          require(p.min_samples_split >= 2, "min_samples_split >= 2");
          require(p.max_features >= 0, "max_features >= 0");
        } else if constexpr (std::is_same_v<T, RandomForestParams>) {
          require(p.n_estimators >= 1, "n_estimators >= 1");
          require(p.max_depth >= 1, "max_depth >= 1");
          require(p.min_samples_leaf >= 1, "min_samples_leaf >= 1");
          require(p.min_samples_split >= 2, "min_samples_split >= 2");
          require(p.max_features >= 0, "max_features >= 0");
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          require(p.k >= 1, "k >= 1");
          require(p.minkowski_p >= 1.0, "minkowski p >= 1");
        } else if constexpr (std::is_same_v<T, SvmParams>) {
          require(p.c > 0.0, "C > 0");
          require(p.tolerance > 0.0, "tolerance > 0");
          require(p.max_iter_factor >= 1, "max_iter_factor >= 1");
          require(p.max_train_rows >= 0, "max_train_rows >= 0");
        } else if constexpr (std::is_same_v<T, AdaBoostParams>) {
          require(p.n_estimators >= 1, "n_estimators >= 1");
          require(rate_ok(p.learning_rate), "learning_rate in (0, 1]");
          require(p.base_max_depth >= 1, "base_max_depth >= 1");
          require(p.base_min_samples_leaf >= 1, "base_min_samples_leaf >= 1");
          require(p.base_min_samples_split >= 2, "base_min_samples_split >= 2");
        } else if constexpr (std::is_same_v<T, MlpParams>) {
          require(!p.hidden.empty(), "at least one hidden layer");
          for (int h : p.hidden) require(h >= 1, "hidden sizes >= 1");
          require(p.dropout >= 0.0 && p.dropout < 1.0, "dropout in [0, 1)");
          require(p.epochs >= 1, "epochs >= 1");
          require(p.batch_size >= 1, "batch_size >= 1");
          require(rate_ok(p.learning_rate), "learning_rate in (0, 1]");
          require(p.beta1 >= 0.0 && p.beta1 < 1.0 && p.beta2 >= 0.0 && p.beta2 < 1.0,
                  "Adam betas in [0, 1)");
          require(p.epsilon > 0.0, "epsilon > 0");
        } else if constexpr (std::is_same_v<T, LogisticParams>) {
          require(p.c > 0.0, "C > 0");
          require(p.max_iter >= 1, "max_iter >= 1");
          require(p.tolerance > 0.0, "tolerance > 0");
        } else if constexpr (std::is_same_v<T, GbdtParams>) {
          require(p.n_estimators >= 1, "n_estimators >= 1");
          require(rate_ok(p.learning_rate), "learning_rate in (0, 1]");
          require(p.max_depth >= 1, "max_depth >= 1");
          require(p.min_samples_leaf >= 1, "min_samples_leaf >= 1");
          require(p.l2 >= 0.0, "l2 >= 0");
          require(p.max_bins >= 2 && p.max_bins <= 65535, "max_bins in [2, 65535]");
        }
      },
      hp);
}

nlohmann::json to_json(const Hyperparameters& hp) {
  return std::visit(
      [](const auto& p) -> nlohmann::json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DecisionTreeParams>) {
          return {{"criterion", "gini"},
                  {"max_depth", p.max_depth},
                  {"min_samples_leaf", p.min_samples_leaf},
                  {"min_samples_split", p.min_samples_split},
                  {"max_features", p.max_features}};
        } else if constexpr (std::is_same_v<T, RandomForestParams>) {
          return {{"n_estimators", p.n_estimators},
                  {"max_depth", p.max_depth},
                  {"min_samples_leaf", p.min_samples_leaf},
                  {"min_samples_split", p.min_samples_split},
                  {"max_features", p.max_features},
                  {"bootstrap", p.bootstrap}};
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          return {{"k", p.k}, {"minkowski_p", p.minkowski_p}};
        } else if constexpr (std::is_same_v<T, SvmParams>) {
          return {{"c", p.c},
                  {"gamma", p.gamma},
                  {"tolerance", p.tolerance},
                  {"max_iter_factor", p.max_iter_factor},
                  {"max_train_rows", p.max_train_rows}};
        } else if constexpr (std::is_same_v<T, AdaBoostParams>) {
          return {{"n_estimators", p.n_estimators},
                  {"learning_rate", p.learning_rate},
                  {"algorithm", "SAMME.R"},
                  {"base_max_depth", p.base_max_depth},
                  {"base_min_samples_leaf", p.base_min_samples_leaf},
                  {"base_min_samples_split", p.base_min_samples_split}};
        } else if constexpr (std::is_same_v<T, MlpParams>) {
          return {{"hidden", p.hidden},          {"activation", "relu"},
                  {"dropout", p.dropout},        {"epochs", p.epochs},
                  {"batch_size", p.batch_size},  {"learning_rate", p.learning_rate},
                  {"beta1", p.beta1},            {"beta2", p.beta2},
                  {"epsilon", p.epsilon}};
        } else if constexpr (std::is_same_v<T, LogisticParams>) {
          return {{"c", p.c},
                  {"penalty", "l2"},
                  {"max_iter", p.max_iter},
                  {"balanced", p.balanced},
                  {"tolerance", p.tolerance}};
        } else {
          return {{"preset", std::string(to_string(p.preset))},
                  {"n_estimators", p.n_estimators},
                  {"learning_rate", p.learning_rate},
                  {"max_depth", p.max_depth},
                  {"min_samples_leaf", p.min_samples_leaf},
                  {"l2", p.l2},
                  {"max_bins", p.max_bins},
                  {"loss", "logistic"}};
        }
      },
      hp);
}

Hyperparameters hyperparameters_from_json(ModelFamily family, const nlohmann::json& overrides) {
  if (!overrides.is_null() && !overrides.is_object()) {
    throw Error(ErrorKind::kConfig, "hyperparameters must be a JSON object");
  }
  const nlohmann::json doc = overrides.is_null() ? nlohmann::json::object() : overrides;
  GbdtPreset preset = GbdtPreset::kLgbmLike;
  if (doc.contains("preset")) preset = parse_gbdt_preset(doc.at("preset").get<std::string>());
  Hyperparameters hp = default_hyperparameters(family, preset);
  try {
    std::visit(
        [&doc](auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, DecisionTreeParams>) {
            read_if(doc, "max_depth", p.max_depth);
            read_if(doc, "min_samples_leaf", p.min_samples_leaf);
            read_if(doc, "min_samples_split", p.min_samples_split);
            read_if(doc, "max_features", p.max_features);
          } else if constexpr (std::is_same_v<T, RandomForestParams>) {
            read_if(doc, "n_estimators", p.n_estimators);
            read_if(doc, "max_depth", p.max_depth);
            read_if(doc, "min_samples_leaf", p.min_samples_leaf);
            read_if(doc, "min_samples_split", p.min_samples_split);
            read_if(doc, "max_features", p.max_features);
            read_if(doc, "bootstrap", p.bootstrap);
          } else if constexpr (std::is_same_v<T, KnnParams>) {
            read_if(doc, "k", p.k);
            read_if(doc, "minkowski_p", p.minkowski_p);
          } else if constexpr (std::is_same_v<T, SvmParams>) {
            read_if(doc, "c", p.c);
            read_if(doc, "gamma", p.gamma);
            read_if(doc, "tolerance", p.tolerance);
            read_if(doc, "max_iter_factor", p.max_iter_factor);
            read_if(doc, "max_train_rows", p.max_train_rows);
          } else if constexpr (std::is_same_v<T, AdaBoostParams>) {
            read_if(doc, "n_estimators", p.n_estimators);
            read_if(doc, "learning_rate", p.learning_rate);
            read_if(doc, "base_max_depth", p.base_max_depth);
            read_if(doc, "base_min_samples_leaf", p.base_min_samples_leaf);
            read_if(doc, "base_min_samples_split", p.base_min_samples_split);
          } else if constexpr (std::is_same_v<T, MlpParams>) {
            read_if(doc, "hidden", p.hidden);
            read_if(doc, "dropout", p.dropout);
            read_if(doc, "epochs", p.epochs);
            read_if(doc, "batch_size", p.batch_size);
            read_if(doc, "learning_rate", p.learning_rate);
            read_if(doc, "beta1", p.beta1);
            read_if(doc, "beta2", p.beta2);
            read_if(doc, "epsilon", p.epsilon);
          } else if constexpr (std::is_same_v<T, LogisticParams>) {
            read_if(doc, "c", p.c);
            read_if(doc, "max_iter", p.max_iter);
            read_if(doc, "balanced", p.balanced);
            read_if(doc, "tolerance", p.tolerance);
          } else {
            read_if(doc, "n_estimators", p.n_estimators);
            read_if(doc, "learning_rate", p.learning_rate);
            read_if(doc, "max_depth", p.max_depth);
            read_if(doc, "min_samples_leaf", p.min_samples_leaf);
            read_if(doc, "l2", p.l2);
            read_if(doc, "max_bins", p.max_bins);
          }
        },
        hp);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("bad hyperparameter value: ") + e.what());
  }
  return hp;
}

std::string model_label(const Hyperparameters& hp) {
  switch (family_of(hp)) {
    case ModelFamily::kDecisionTree:
      return "DT";
    case ModelFamily::kRandomForest:
      return "RF";
    case ModelFamily::kKnn:
      return "KNN";
    case ModelFamily::kSvmRbf:
      return "SVM";
    case ModelFamily::kAdaBoost:
      return "AdaBoost";
    case ModelFamily::kMlp:
      return "DNN";
    case ModelFamily::kLogisticRegression:
      return "LR";
    case ModelFamily::kGbdt:
      return std::get<GbdtParams>(hp).preset == GbdtPreset::kLgbmLike ? "LGBM" : "CatBoost";
  }
  return "model";
}

}  // namespace featfuse
