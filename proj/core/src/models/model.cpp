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

#include <algorithm>
#include <cmath>

#include "featfuse/models.hpp"
#include "models/classifier.hpp"

namespace featfuse {

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

TrainedModel::TrainedModel(ModelFamily family, Hyperparameters hp, std::vector<int> classes,
                           std::size_t feature_count,
                           std::shared_ptr<const detail::Classifier> impl)
    : family_(family),
      hp_(std::move(hp)),
      classes_(std::move(classes)),
      feature_count_(feature_count),
      impl_(std::move(impl)) {}

bool TrainedModel::warning() const noexcept { return impl_->warning(); }

Matrix TrainedModel::predict_proba(const Matrix& rows) const {
  if (!rows.empty() && rows.cols() != feature_count_) {
    throw Error(ErrorKind::kData, "expected rows of width " + std::to_string(feature_count_) +
                                      ", got " + std::to_string(rows.cols()));
  }
  Matrix out;
  if (rows.empty()) return Matrix(0, classes_.size());
  impl_->predict_proba(rows, out);
  return out;
}

std::vector<int> TrainedModel::predict(const Matrix& rows) const {
  const Matrix proba = predict_proba(rows);
  std::vector<int> out(proba.rows());
  for (std::size_t i = 0; i < proba.rows(); ++i) out[i] = classes_[argmax(proba.row(i))];
  return out;
}

nlohmann::json TrainedModel::to_json() const {
  return {{"format", "featfuse-model"},
          {"version", kModelFormatVersion},
          {"family", std::string(featfuse::to_string(family_))},
          {"hyperparameters", featfuse::to_json(hp_)},
          {"classes", classes_},
          {"feature_count", feature_count_},
          {"parameters", impl_->parameters()}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", "") != "featfuse-model") {
      throw Error(ErrorKind::kData, "not a featfuse model document");
    }
    if (!doc.contains("version") || doc.at("version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorKind::kData, "unsupported model document version");
    }
    const ModelFamily family = parse_model_family(doc.at("family").get<std::string>());
    Hyperparameters hp = hyperparameters_from_json(family, doc.at("hyperparameters"));
    auto classes = doc.at("classes").get<std::vector<int>>();
    const auto feature_count = doc.at("feature_count").get<std::size_t>();
    const auto& params = doc.at("parameters");
    detail::ClassifierPtr impl;
    switch (family) {
      case ModelFamily::kDecisionTree:
        impl = detail::load_decision_tree(params);
        break;
      case ModelFamily::kRandomForest:
        impl = detail::load_random_forest(params);
        break;
      case ModelFamily::kKnn:
        impl = detail::load_knn(params);
        break;
      case ModelFamily::kSvmRbf:
        impl = detail::load_svm(params);
        break;
      case ModelFamily::kAdaBoost:
        impl = detail::load_adaboost(params);
        break;
      case ModelFamily::kMlp:
        impl = detail::load_mlp(params);
        break;
      case ModelFamily::kLogisticRegression:
        impl = detail::load_logistic(params);
        break;
      case ModelFamily::kGbdt:
        impl = detail::load_gbdt(params);
        break;
    }
    if (impl->n_classes() != classes.size()) {
      throw Error(ErrorKind::kData, "class roster does not match model parameters");
    }
    return TrainedModel(family, std::move(hp), std::move(classes), feature_count, std::move(impl));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kData, std::string("malformed model document: ") + e.what());
  }
}

TrainedModel train(const Hyperparameters& hp, const Dataset& train_set, std::uint64_t seed) {
  validate(hp);
  if (train_set.size() == 0) throw Error(ErrorKind::kTraining, "empty training set");
  std::vector<int> classes;
  for (const auto& [label, count] : train_set.class_counts) {
    if (count > 0) classes.push_back(label);
  }
  if (classes.size() < 2) throw Error(ErrorKind::kTraining, "training set has fewer than 2 classes");

  std::vector<int> encoded(train_set.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    encoded[i] = static_cast<int>(
        std::lower_bound(classes.begin(), classes.end(), train_set.labels[i]) - classes.begin());
  }
  const detail::TrainingData data{train_set.rows, encoded, static_cast<int>(classes.size())};
  const ModelFamily family = family_of(hp);
  detail::ClassifierPtr impl;
  switch (family) {
    case ModelFamily::kDecisionTree:
      impl = detail::fit_decision_tree(std::get<DecisionTreeParams>(hp), data, seed);
      break;
    case ModelFamily::kRandomForest:
      impl = detail::fit_random_forest(std::get<RandomForestParams>(hp), data, seed);
      break;
    case ModelFamily::kKnn:
      impl = detail::fit_knn(std::get<KnnParams>(hp), data);
      break;
    case ModelFamily::kSvmRbf:
      impl = detail::fit_svm(std::get<SvmParams>(hp), data, seed);
      break;
    case ModelFamily::kAdaBoost:
      impl = detail::fit_adaboost(std::get<AdaBoostParams>(hp), data, seed);
      break;
    case ModelFamily::kMlp:
      impl = detail::fit_mlp(std::get<MlpParams>(hp), data, seed);
      break;
    case ModelFamily::kLogisticRegression:
      impl = detail::fit_logistic(std::get<LogisticParams>(hp), data);
      break;
    case ModelFamily::kGbdt:
      impl = detail::fit_gbdt(std::get<GbdtParams>(hp), data);
      break;
  }
  return TrainedModel(family, hp, std::move(classes), train_set.rows.cols(), std::move(impl));
}

TrainedModel train(ModelFamily family, const Hyperparameters& hp, const Dataset& train_set,
                   std::uint64_t seed) {
  if (family_of(hp) != family) {
    throw Error(ErrorKind::kConfig, "hyperparameters for " + std::string(to_string(family_of(hp))) +
                                        " passed to " + std::string(to_string(family)));
  }
  return train(hp, train_set, seed);
}

}  // namespace featfuse
