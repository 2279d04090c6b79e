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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "featfuse/evaluation.hpp"

namespace featfuse {
namespace {

const std::filesystem::path kFixtures = FEATFUSE_TEST_FIXTURES;

using Counts = std::vector<std::vector<std::size_t>>;

std::vector<int> roster_of(std::size_t k) {
  std::vector<int> r(k);
  for (std::size_t i = 0; i < k; ++i) r[i] = static_cast<int>(i);
  return r;
}

// Straight from the definitions, one class at a time.
struct OracleClass {
  double precision;
  double recall;
  double f1;
};

OracleClass oracle_class(const Counts& c, std::size_t k) {
  double tp = static_cast<double>(c[k][k]);
  double col = 0.0;
  double row = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    col += static_cast<double>(c[i][k]);
    row += static_cast<double>(c[k][i]);
  }
  const double p = col > 0 ? tp / col : 0.0;
  const double r = row > 0 ? tp / row : 0.0;
  return {p, r, p + r > 0 ? 2 * p * r / (p + r) : 0.0};
}

double oracle_accuracy(const Counts& c) {
  double trace = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    trace += static_cast<double>(c[i][i]);
    for (std::size_t v : c[i]) total += static_cast<double>(v);
  }
  return trace / total;
}

Dataset blobs(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix rows(n, p);
  std::vector<int> labels(n);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(i % 2);
    for (std::size_t j = 0; j < p; ++j) rows(i, j) = rng.normal() + (j < 2 ? labels[i] : 0);
  }
  return Dataset::make(FeatureSchema(names, "y"), rows, labels);
}

TEST(ConfusionMatrixTest, Examples) {
  const std::vector<int> t{0, 0, 1, 1};
  const std::vector<int> p{0, 1, 1, 1};
  const ConfusionMatrix cm = confusion_matrix(t, p, {0, 1});
  EXPECT_EQ(cm.counts, (std::vector<std::size_t>{1, 1, 0, 2}));
  EXPECT_EQ(cm.total(), 4u);
  const ConfusionMatrix diag = confusion_matrix(t, t, {0, 1});
  EXPECT_EQ(diag.counts, (std::vector<std::size_t>{2, 0, 0, 2}));
  EXPECT_THROW(confusion_matrix({}, {}, {0, 1}), Error);
}

TEST(ConfusionMatrixTest, Errors) {
  const std::vector<int> t{0, 5};
  const std::vector<int> p{0, 0};
  const std::vector<int> short_p{0};
  EXPECT_THROW(confusion_matrix(t, p, {0, 1}), Error);
  EXPECT_THROW(confusion_matrix(t, short_p, {0, 5}), Error);
  EXPECT_THROW(confusion_matrix_from_counts({0, 1}, {{1, 2}}), Error);
}

TEST(MetricsTest, BinaryPositiveClass) {
  // TP=3, FP=1, FN=1, TN=5 with rows = truth.
  const auto cm = confusion_matrix_from_counts({0, 1}, {{5, 1}, {1, 3}});
  const MetricsReport r = classification_metrics(cm, Averaging::kPositiveClass, 1);
  EXPECT_NEAR(r.accuracy, 0.8, 1e-12);
  EXPECT_NEAR(r.precision, 0.75, 1e-12);
  EXPECT_NEAR(r.recall, 0.75, 1e-12);
  EXPECT_NEAR(r.f1, 0.75, 1e-12);
  ASSERT_EQ(r.per_class.size(), 2u);
  EXPECT_EQ(r.per_class[0].support, 6u);
}

TEST(MetricsTest, PerfectPredictions) {
  const auto cm = confusion_matrix_from_counts({0, 1, 2}, {{4, 0, 0}, {0, 3, 0}, {0, 0, 9}});
  for (Averaging a : {Averaging::kMacro, Averaging::kMicro}) {
    const MetricsReport r = classification_metrics(cm, a);
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_EQ(r.f1, 1.0);
  }
}

TEST(MetricsTest, ThreeClassMacroPrecision) {
  const auto cm = confusion_matrix_from_counts({0, 1, 2}, {{2, 0, 0}, {1, 1, 0}, {0, 0, 2}});
  const MetricsReport r = classification_metrics(cm, Averaging::kMacro);
  EXPECT_NEAR(r.precision, (2.0 / 3.0 + 1.0 + 1.0) / 3.0, 1e-12);
  EXPECT_NEAR(r.precision, 0.889, 5e-4);
}

TEST(MetricsTest, ZeroDenominatorsAreFlagged) {
  // Class 1 is never predicted.
  const auto cm = confusion_matrix_from_counts({0, 1}, {{3, 0}, {2, 0}});
  const MetricsReport r = classification_metrics(cm, Averaging::kPositiveClass, 1);
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_TRUE(r.zero_division);
  EXPECT_TRUE(r.per_class[1].precision_undefined);
  EXPECT_FALSE(r.per_class[1].recall_undefined);
}

TEST(MetricsTest, AbsentPositiveClassIsAnError) {
  const auto cm = confusion_matrix_from_counts({0, 1}, {{1, 0}, {0, 1}});
  EXPECT_THROW(classification_metrics(cm, Averaging::kPositiveClass, 4), Error);
}

TEST(MetricsTest, FixedMatricesAgainstDefinitionOracle) {
  const std::vector<Counts> matrices{
      {{5, 1}, {1, 3}},
      {{0, 4}, {0, 6}},
      {{10, 0}, {7, 0}},
      {{1, 2}, {3, 4}},
      {{50, 3}, {12, 35}},
      {{2, 0, 0}, {1, 1, 0}, {0, 0, 2}},
      {{3, 1, 1}, {0, 4, 2}, {1, 1, 5}},
      {{0, 0, 3}, {0, 0, 2}, {0, 0, 1}},
      {{7, 2, 0, 1}, {1, 8, 1, 0}, {0, 0, 0, 0}, {2, 0, 3, 6}},
      {{1, 0, 0, 0, 0, 0},
       {0, 2, 0, 0, 1, 0},
       {0, 0, 3, 1, 0, 0},
       {0, 1, 0, 4, 0, 0},
       {2, 0, 0, 0, 5, 1},
       {0, 0, 1, 0, 0, 6}},
      {{9}, },
      {{4, 4}, {4, 4}},
  };
  for (std::size_t m = 0; m < matrices.size(); ++m) {
    SCOPED_TRACE("matrix " + std::to_string(m));
    const Counts& c = matrices[m];
    const std::size_t k = c.size();
    const auto cm = confusion_matrix_from_counts(roster_of(k), c);
    const MetricsReport macro = classification_metrics(cm, Averaging::kMacro);
    double mp = 0.0;
    double mr = 0.0;
    double mf = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const OracleClass o = oracle_class(c, i);
      EXPECT_NEAR(macro.per_class[i].precision, o.precision, 1e-12);
      EXPECT_NEAR(macro.per_class[i].recall, o.recall, 1e-12);
      EXPECT_NEAR(macro.per_class[i].f1, o.f1, 1e-12);
      mp += o.precision;
      mr += o.recall;
      mf += o.f1;
    }
    EXPECT_NEAR(macro.accuracy, oracle_accuracy(c), 1e-12);
    EXPECT_NEAR(macro.precision, mp / static_cast<double>(k), 1e-12);
    EXPECT_NEAR(macro.recall, mr / static_cast<double>(k), 1e-12);
    EXPECT_NEAR(macro.f1, mf / static_cast<double>(k), 1e-12);
    if (k >= 2) {
      const OracleClass pos = oracle_class(c, 1);
      const MetricsReport bin = classification_metrics(cm, Averaging::kPositiveClass, 1);
      EXPECT_NEAR(bin.precision, pos.precision, 1e-12);
      EXPECT_NEAR(bin.recall, pos.recall, 1e-12);
      EXPECT_NEAR(bin.f1, pos.f1, 1e-12);
    }
  }
}

TEST(MetricsTest, MicroEqualsAccuracyOnRandomMatrices) {
  Rng rng(314);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + rng.below(6);
    Counts c(k, std::vector<std::size_t>(k));
    for (auto& row : c) {
      for (auto& v : row) v = rng.below(3) == 0 ? 0 : rng.below(40);
    }
    c[0][0] += 1;  // never empty
    const auto cm = confusion_matrix_from_counts(roster_of(k), c);
    const MetricsReport micro = classification_metrics(cm, Averaging::kMicro);
    EXPECT_NEAR(micro.precision, micro.accuracy, 1e-12);
    EXPECT_NEAR(micro.recall, micro.accuracy, 1e-12);
    EXPECT_NEAR(micro.accuracy, oracle_accuracy(c), 1e-12);
    const MetricsReport macro = classification_metrics(cm, Averaging::kMacro);
    for (double v : {macro.accuracy, macro.precision, macro.recall, macro.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(MetricsTest, JsonCarriesConventionAndPerClass) {
  const auto cm = confusion_matrix_from_counts({0, 1}, {{5, 1}, {1, 3}});
  const nlohmann::json doc = classification_metrics(cm, Averaging::kPositiveClass).to_json();
  EXPECT_EQ(doc.at("averaging"), "positive_class");
  EXPECT_EQ(doc.at("per_class").size(), 2u);
  EXPECT_EQ(parse_averaging("macro"), Averaging::kMacro);
  EXPECT_THROW(parse_averaging("weighted"), Error);
}

TEST(SubsetTest, AllFeaturesMatchesUnprojectedTraining) {
  const Dataset tr = blobs(300, 4, 1);
  const Dataset te = blobs(100, 4, 2);
  const LogisticParams hp;
  const MetricsReport subset =
      evaluate_feature_subset(tr, te, tr.schema.feature_names(), hp, 9);
  const TrainedModel m = train(hp, tr, 9);
  const auto pred = m.predict(te.rows);
  const MetricsReport direct =
      classification_metrics(confusion_matrix(te.labels, pred, {0, 1}), Averaging::kPositiveClass);
  EXPECT_EQ(subset.accuracy, direct.accuracy);
  EXPECT_EQ(subset.f1, direct.f1);
  EXPECT_EQ(subset.confusion.counts, direct.confusion.counts);
}

TEST(SubsetTest, FeatureOrderDoesNotMatter) {
  const Dataset tr = blobs(300, 5, 3);
  const Dataset te = blobs(120, 5, 4);
  GbdtParams hp = gbdt_preset_defaults(GbdtPreset::kLgbmLike);
  hp.n_estimators = 15;
  const auto a = evaluate_feature_subset(tr, te, {"x0", "x3", "x1"}, hp, 5);
  const auto b = evaluate_feature_subset(tr, te, {"x1", "x0", "x3"}, hp, 5);
  EXPECT_EQ(a.confusion.counts, b.confusion.counts);
  EXPECT_EQ(a.f1, b.f1);
}

TEST(SubsetTest, Errors) {
  const Dataset d = blobs(40, 3, 1);
  EXPECT_THROW(evaluate_feature_subset(d, d, {}, LogisticParams{}, 0), Error);
  EXPECT_THROW(evaluate_feature_subset(d, d, {"nope"}, LogisticParams{}, 0), Error);
}

TEST(ConformanceTest, PublishedTablesPassRequiredChecks) {
  const Fixtures fx = load_fixtures(kFixtures);
  EXPECT_EQ(fx.tables.size(), 3u);
  EXPECT_FALSE(fx.reference.empty());
  const ConformanceReport report = conformance_check(fuse_fixtures(fx, FusionSpec{}), fx);
  EXPECT_TRUE(report.passed());

  std::size_t required = 0;
  for (const auto& cell : report.cells) required += cell.required ? 1 : 0;
  EXPECT_EQ(required, 4u);

  const ConformanceCell* binary = report.find("veremi_binary", kLeveledColumn);
  ASSERT_NE(binary, nullptr);
  EXPECT_TRUE(binary->required);
  EXPECT_NE(binary->verdict, Verdict::kMismatch);
  const ConformanceCell* lime = report.find("veremi_binary", "lime");
  ASSERT_NE(lime, nullptr);
  EXPECT_EQ(lime->verdict, Verdict::kExactOrderMatch);
  const ConformanceCell* dalex = report.find("veremi_binary", "permutation");
  ASSERT_NE(dalex, nullptr);
  EXPECT_EQ(dalex->kind, CheckKind::kNonzeroPrefixOrder);
  EXPECT_TRUE(dalex->passed());
  const ConformanceCell* multi = report.find("veremi_multiclass", kLeveledColumn);
  ASSERT_NE(multi, nullptr);
  EXPECT_TRUE(multi->passed());
}

TEST(ConformanceTest, SensorShapIsADocumentedMismatch) {
  const Fixtures fx = load_fixtures(kFixtures);
  const ConformanceReport report = conformance_check(fuse_fixtures(fx, FusionSpec{}), fx);
  const ConformanceCell* cell = report.find("sensor", "shap");
  ASSERT_NE(cell, nullptr);
  EXPECT_FALSE(cell->required);
  EXPECT_EQ(cell->verdict, Verdict::kMismatch);
  EXPECT_FALSE(cell->note.empty());
  EXPECT_FALSE(cell->missing.empty());
}

TEST(ConformanceTest, IdenticalOrderIsExactMatch) {
  Fixtures fx = load_fixtures(kFixtures);
  const auto fused = fuse_fixtures(fx, FusionSpec{});
  // Replace the published sensor LIME column with the computed top-5.
  fx.combined["sensor"]["lime"] = top_k_names(fused.at("sensor").method("lime"), 5);
  const ConformanceCell* cell = conformance_check(fused, fx).find("sensor", "lime");
  ASSERT_NE(cell, nullptr);
  EXPECT_EQ(cell->verdict, Verdict::kExactOrderMatch);
  EXPECT_TRUE(cell->missing.empty());
  EXPECT_TRUE(cell->extra.empty());
}

TEST(ConformanceTest, FailsWhenARequiredCellBreaks) {
  Fixtures fx = load_fixtures(kFixtures);
  fx.combined["veremi_binary"][std::string(kLeveledColumn)] = {"pos_z", "spd_z", "pos_x", "pos_y"};
  const ConformanceReport report = conformance_check(fuse_fixtures(fx, FusionSpec{}), fx);
  EXPECT_FALSE(report.passed());
  const ConformanceCell* cell = report.find("veremi_binary", kLeveledColumn);
  ASSERT_NE(cell, nullptr);
  EXPECT_EQ(cell->missing, (std::vector<std::string>{"pos_z", "spd_z"}));
}

TEST(ConformanceTest, DeterministicAndJsonRoundTrip) {
  const Fixtures fx = load_fixtures(kFixtures);
  const auto a = conformance_check(fuse_fixtures(fx, FusionSpec{}), fx).to_json();
  const auto b = conformance_check(fuse_fixtures(fx, FusionSpec{}), fx).to_json();
  EXPECT_EQ(a.dump(), b.dump());
  const ConformanceReport back = ConformanceReport::from_json(a);
  EXPECT_EQ(back.to_json().dump(), a.dump());
  EXPECT_NE(back.to_markdown().find("veremi_binary"), std::string::npos);
}

TEST(ConformanceTest, MissingFixturesAreAnError) {
  EXPECT_THROW(load_fixtures("/nonexistent/fixtures"), Error);
  EXPECT_EQ(fixture_top_k("sensor"), 5u);
  EXPECT_EQ(fixture_top_k("veremi_binary"), 4u);
}

}  // namespace
}  // namespace featfuse
