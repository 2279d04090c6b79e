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

#include "featfuse/evaluation.hpp"

#include <algorithm>
#include <numeric>

namespace featfuse {
namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  if (den == 0) {
    undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 const std::vector<int>& roster) {
  if (y_true.empty()) throw Error(ErrorKind::kEvaluation, "no predictions to evaluate");
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::kEvaluation, "true and predicted labels differ in length");
  }
  if (roster.empty()) throw Error(ErrorKind::kEvaluation, "empty class roster");
  auto index_of = [&roster](int label) {
    const auto it = std::find(roster.begin(), roster.end(), label);
    if (it == roster.end()) {
      throw Error(ErrorKind::kEvaluation, "label " + std::to_string(label) + " is outside the roster");
    }
    return static_cast<std::size_t>(it - roster.begin());
  };
  ConfusionMatrix cm{roster, std::vector<std::size_t>(roster.size() * roster.size(), 0)};
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++cm.counts[index_of(y_true[i]) * roster.size() + index_of(y_pred[i])];
  }
  return cm;
}

ConfusionMatrix confusion_matrix_from_counts(const std::vector<int>& roster,
                                             const std::vector<std::vector<std::size_t>>& counts) {
  if (roster.empty() || counts.size() != roster.size()) {
    throw Error(ErrorKind::kEvaluation, "confusion counts do not match the roster");
  }
  ConfusionMatrix cm{roster, {}};
  for (const auto& row : counts) {
    if (row.size() != roster.size()) {
      throw Error(ErrorKind::kEvaluation, "confusion counts must be square");
    }
    cm.counts.insert(cm.counts.end(), row.begin(), row.end());
  }
  return cm;
}

std::string_view to_string(Averaging averaging) {
  switch (averaging) {
    case Averaging::kPositiveClass:
      return "positive_class";
    case Averaging::kMacro:
      return "macro";
    case Averaging::kMicro:
      return "micro";
  }
  return "unknown";
}

Averaging parse_averaging(std::string_view name) {
  if (name == "positive_class") return Averaging::kPositiveClass;
  if (name == "macro") return Averaging::kMacro;
  if (name == "micro") return Averaging::kMicro;
  throw Error(ErrorKind::kConfig, "unknown averaging convention '" + std::string(name) + "'");
}

MetricsReport classification_metrics(const ConfusionMatrix& cm, Averaging averaging,
                                     int positive_class) {
  const std::size_t k = cm.classes();
  const std::size_t total = cm.total();
  if (k == 0 || total == 0) throw Error(ErrorKind::kEvaluation, "empty confusion matrix");

  MetricsReport rep;
  rep.averaging = averaging;
  rep.positive_class = positive_class;
  rep.confusion = cm;
  std::size_t diagonal = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t o = 0; o < k; ++o) {
      predicted += cm.at(o, c);
      actual += cm.at(c, o);
    }
    const std::size_t tp = cm.at(c, c);
    diagonal += tp;
    ClassMetrics m;
    m.label = cm.roster[c];
    m.support = actual;
    m.precision = ratio(tp, predicted, m.precision_undefined);
    m.recall = ratio(tp, actual, m.recall_undefined);
    m.f1 = harmonic(m.precision, m.recall);
    rep.per_class.push_back(m);
  }
  rep.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);

  switch (averaging) {
    case Averaging::kPositiveClass: {
      const auto it = std::find(cm.roster.begin(), cm.roster.end(), positive_class);
      if (it == cm.roster.end()) {
        throw Error(ErrorKind::kEvaluation,
                    "positive class " + std::to_string(positive_class) + " is not in the roster");
      }
      const ClassMetrics& m = rep.per_class[static_cast<std::size_t>(it - cm.roster.begin())];
      rep.precision = m.precision;
      rep.recall = m.recall;
      rep.f1 = m.f1;
      rep.zero_division = m.precision_undefined || m.recall_undefined;
      break;
    }
    case Averaging::kMacro: {
      for (const auto& m : rep.per_class) {
        rep.precision += m.precision;
        rep.recall += m.recall;
        rep.f1 += m.f1;
        rep.zero_division = rep.zero_division || m.precision_undefined || m.recall_undefined;
      }
      rep.precision /= static_cast<double>(k);
      rep.recall /= static_cast<double>(k);
      rep.f1 /= static_cast<double>(k);
      break;
    }
    case Averaging::kMicro:
      // Single-label: pooled TP over pooled predictions (or actuals) is the accuracy.
      rep.precision = rep.accuracy;
      rep.recall = rep.accuracy;
      rep.f1 = harmonic(rep.precision, rep.recall);
      break;
  }
  return rep;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& m : per_class) {
    classes.push_back({{"label", m.label},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support},
                       {"precision_undefined", m.precision_undefined},
                       {"recall_undefined", m.recall_undefined}});
  }
  nlohmann::json matrix = nlohmann::json::array();
  for (std::size_t r = 0; r < confusion.classes(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < confusion.classes(); ++c) row.push_back(confusion.at(r, c));
    matrix.push_back(row);
  }
  nlohmann::json doc = {{"averaging", std::string(featfuse::to_string(averaging))},
                        {"accuracy", accuracy},
                        {"precision", precision},
                        {"recall", recall},
                        {"f1", f1},
                        {"zero_division", zero_division},
                        {"per_class", classes},
                        {"confusion_matrix", {{"roster", confusion.roster}, {"counts", matrix}}}};
  if (averaging == Averaging::kPositiveClass) doc["positive_class"] = positive_class;
  return doc;
}

MetricsReport evaluate_feature_subset(const Dataset& train, const Dataset& test,
                                      const std::vector<std::string>& features,
                                      const Hyperparameters& hp, std::uint64_t seed,
                                      Averaging averaging, int positive_class) {
  if (features.empty()) throw Error(ErrorKind::kEvaluation, "empty feature subset");
  const Dataset tr = train.project(features);
  const Dataset te = test.project(features);
  const TrainedModel model = featfuse::train(hp, tr, seed);
  const std::vector<int> predicted = model.predict(te.rows);
  // Classes the model knows plus any extra class seen in the test labels.
  std::vector<int> roster = model.classes();
  for (int c : te.labels) {
    if (std::find(roster.begin(), roster.end(), c) == roster.end()) roster.push_back(c);
  }
  std::sort(roster.begin(), roster.end());
  return classification_metrics(confusion_matrix(te.labels, predicted, roster), averaging,
                                positive_class);
}

}  // namespace featfuse
