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
#include <filesystem>
#include <fstream>
#include <numeric>

#include "featfuse/explainers.hpp"

namespace featfuse {
namespace {

// Wraps a scalar function of one row as a single-output model.
ModelOutput scalar_model(std::function<double(std::span<const double>)> f) {
  return {[f](const Matrix& rows) {
            Matrix out(rows.rows(), 1);
            for (std::size_t i = 0; i < rows.rows(); ++i) out(i, 0) = f(rows.row(i));
            return out;
          },
          1};
}

ScalerParams unit_stats(std::size_t p) {
  ScalerParams s;
  s.mean.assign(p, 0.0);
  s.sd.assign(p, 1.0);
  s.constant.assign(p, false);
  return s;
}

Matrix gaussian_rows(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, p);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

Dataset labelled(const Matrix& rows, std::vector<int> labels) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < rows.cols(); ++j) names.push_back("x" + std::to_string(j));
  return Dataset::make(FeatureSchema(names, "y"), rows, std::move(labels));
}

// Shapley value by averaging marginal contributions over every ordering,
// with the interventional value function evaluated row by row.
std::vector<double> shapley_by_orderings(const ModelOutput& model, std::span<const double> x,
                                         const Matrix& background, std::size_t output) {
  const std::size_t p = x.size();
  const auto value = [&](const std::vector<bool>& in) {
    Matrix hybrid = background;
    for (std::size_t b = 0; b < hybrid.rows(); ++b) {
      for (std::size_t j = 0; j < p; ++j) {
        if (in[j]) hybrid(b, j) = x[j];
      }
    }
    const Matrix f = model.fn(hybrid);
    double sum = 0.0;
    for (std::size_t b = 0; b < f.rows(); ++b) sum += f(b, output);
    return sum / static_cast<double>(f.rows());
  };
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(p, 0.0);
  std::size_t count = 0;
  do {
    std::vector<bool> in(p, false);
    double prev = value(in);
    for (std::size_t j : order) {
      in[j] = true;
      const double next = value(in);
      phi[j] += next - prev;
      prev = next;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= static_cast<double>(count);
  return phi;
}

TEST(ShapTest, LinearModelAndDummy) {
  const auto f = scalar_model([](auto r) { return 2 * r[0] + 0 * r[1]; });
  const ShapMatrix m = shap_values(f, Matrix{{1, 1}}, Matrix{{0, 0}});
  EXPECT_NEAR(m.values[0](0, 0), 2.0, 1e-12);
  EXPECT_EQ(m.values[0](0, 1), 0.0);
  EXPECT_EQ(m.base_values[0], 0.0);
}

TEST(ShapTest, SymmetricFeaturesShareCredit) {
  const auto f = scalar_model([](auto r) { return r[0] + r[1]; });
  const ShapMatrix m = shap_values(f, Matrix{{1, 1}}, Matrix{{0, 0}});
  EXPECT_NEAR(m.values[0](0, 0), 1.0, 1e-12);
  EXPECT_NEAR(m.values[0](0, 1), 1.0, 1e-12);
}

TEST(ShapTest, MatchesOrderingAverageOnSeededTree) {
  const Matrix x = gaussian_rows(200, 3, 5);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) y[i] = (x(i, 0) > 0.2) != (x(i, 1) * x(i, 2) > 0) ? 1 : 0;
  DecisionTreeParams hp;
  hp.max_depth = 6;
  const TrainedModel model = train(hp, labelled(x, y), 13);
  const ModelOutput f = shap_output(model);
  const Matrix background = select_background(x, 12, 3);
  const Matrix instances = gaussian_rows(5, 3, 99);
  const ShapMatrix m = shap_values(f, instances, background);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto oracle = shapley_by_orderings(f, instances.row(i), background, 0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(m.values[0](i, j), oracle[j], 1e-9);
  }
}

TEST(ShapTest, OrderingOracleOnNonlinearFourFeatureFunction) {
  const auto f = scalar_model(
      [](auto r) { return std::sin(r[0]) * r[1] + std::max(r[2], r[3]) + r[0] * r[3] * r[3]; });
  const Matrix background = gaussian_rows(7, 4, 1);
  const Matrix instances = gaussian_rows(4, 4, 2);
  const ShapMatrix m = shap_values(f, instances, background);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto oracle = shapley_by_orderings(f, instances.row(i), background, 0);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(m.values[0](i, j), oracle[j], 1e-9);
  }
}

TEST(ShapTest, EfficiencyPerClassOnMulticlassForest) {
  const Matrix x = gaussian_rows(240, 5, 7);
  std::vector<int> y(240);
  for (std::size_t i = 0; i < 240; ++i) y[i] = x(i, 0) > 0.5 ? 2 : (x(i, 3) > 0 ? 1 : 0);
  RandomForestParams hp;
  hp.n_estimators = 8;
  const TrainedModel model = train(hp, labelled(x, y), 3);
  const ModelOutput f = shap_output(model);
  ASSERT_EQ(f.outputs, 3u);
  const Matrix instances = gaussian_rows(6, 5, 8);
  const ShapMatrix m = shap_values(f, instances, select_background(x, 20, 1));
  ASSERT_EQ(m.values.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < 6; ++i) {
      double sum = m.base_values[k];
      for (std::size_t j = 0; j < 5; ++j) sum += m.values[k](i, j);
      EXPECT_NEAR(sum, m.outputs(i, k), 1e-9);
    }
  }
}

TEST(ShapTest, IgnoredFeatureGetsExactlyZero) {
  const auto f = scalar_model([](auto r) { return std::tanh(r[0] * r[2]) + r[1] * r[1]; });
  const ShapMatrix m = shap_values(f, gaussian_rows(10, 4, 3), gaussian_rows(9, 4, 4));
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(m.values[0](i, 3), 0.0);
}

TEST(ShapTest, Errors) {
  const auto f = scalar_model([](auto r) { return r[0]; });
  EXPECT_THROW(shap_values(f, Matrix{{1}}, Matrix()), Error);
  EXPECT_THROW(shap_values(f, Matrix(1, 5), Matrix(1, 5), 4), Error);
  EXPECT_THROW(select_background(Matrix(), 3, 0), Error);
}

TEST(ShapGlobalTest, MeanAbsoluteValue) {
  ShapMatrix m;
  m.values = {Matrix{{1, -2}, {3, 0}}};
  EXPECT_EQ(shap_global(m).scores, (std::vector<double>{2, 1}));
  m.values = {Matrix(3, 2)};
  EXPECT_EQ(shap_global(m).scores, (std::vector<double>{0, 0}));
  m.values = {Matrix{{-0.5, 4}}};
  EXPECT_EQ(shap_global(m).scores, (std::vector<double>{0.5, 4}));
}

TEST(ShapGlobalTest, PoolsClasses) {
  ShapMatrix m;
  m.values = {Matrix{{1, 0}}, Matrix{{-3, 2}}};
  EXPECT_EQ(shap_global(m).scores, (std::vector<double>{2, 1}));
}

TEST(LimeTest, ConstantModelHasZeroCoefficients) {
  const auto f = scalar_model([](auto) { return 0.5; });
  ExplainerConfig cfg;
  cfg.seed = 4;
  const std::vector<double> x{0.3, -1.0, 2.0};
  for (double c : lime_explain_instance(f, x, unit_stats(3), cfg, 0)) EXPECT_NEAR(c, 0.0, 1e-6);
}

TEST(LimeTest, SigmoidOfFirstFeatureDominates) {
  const auto f = scalar_model([](auto r) { return 1.0 / (1.0 + std::exp(-3 * r[0])); });
  ExplainerConfig cfg;
  cfg.seed = 11;
  const std::vector<double> x{0.1, 0.4, -0.7, 1.2};
  const auto coef = lime_explain_instance(f, x, unit_stats(4), cfg, 0);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_GT(std::fabs(coef[0]), std::fabs(coef[j]));
}

TEST(LimeTest, IgnoredFeatureIsNegligible) {
  const auto f = scalar_model([](auto r) { return 0.5 + 0.3 * r[0] - 0.2 * r[2]; });
  ExplainerConfig cfg;
  cfg.seed = 12;
  const std::vector<double> x{1.0, -2.0, 0.5};
  const auto coef = lime_explain_instance(f, x, unit_stats(3), cfg, 0);
  const double biggest = std::max({std::fabs(coef[0]), std::fabs(coef[1]), std::fabs(coef[2])});
  EXPECT_LT(std::fabs(coef[1]), 1e-3 * biggest);
}

TEST(LimeTest, DeterministicPerSeedAndInstance) {
  const auto f = scalar_model([](auto r) { return std::tanh(r[0] - r[1]); });
  ExplainerConfig cfg;
  cfg.seed = 5;
  const std::vector<double> x{0.2, 0.1};
  const auto a = lime_explain_instance(f, x, unit_stats(2), cfg, 3);
  EXPECT_EQ(a, lime_explain_instance(f, x, unit_stats(2), cfg, 3));
  EXPECT_NE(a, lime_explain_instance(f, x, unit_stats(2), cfg, 4));
}

TEST(LimeGlobalTest, AveragesAbsoluteCoefficients) {
  const auto avg = average_absolute({{0.5, -0.1}, {0.3, 0.1}});
  EXPECT_NEAR(avg[0], 0.4, 1e-15);
  EXPECT_NEAR(avg[1], 0.1, 1e-15);
}

TEST(LimeGlobalTest, ConstantModelGivesZeroVector) {
  const auto f = scalar_model([](auto) { return 0.25; });
  ExplainerConfig cfg;
  cfg.lime_samples_per_instance = 200;
  const ImportanceVector iv = lime_global(f, gaussian_rows(10, 3, 1), unit_stats(3), cfg);
  for (double s : iv.scores) EXPECT_NEAR(s, 0.0, 1e-6);
  EXPECT_EQ(iv.method, ExplainerMethod::kLime);
}

TEST(LimeGlobalTest, LinearModelRecoversWeightOrdering) {
  const std::vector<double> w{3.0, -1.0, 0.5, 2.0};
  const auto f = scalar_model([w](auto r) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * r[j];
    return s;
  });
  ExplainerConfig cfg;
  cfg.seed = 21;
  cfg.lime_samples_per_instance = 300;
  cfg.lime_instances = 20;
  const Matrix rows = gaussian_rows(50, 4, 2);
  const ImportanceVector iv = lime_global(f, rows, unit_stats(4), cfg);
  EXPECT_EQ(to_ranks(iv.scores), (RankVector{1, 3, 4, 2}));
  EXPECT_EQ(iv.scores, lime_global(f, rows, unit_stats(4), cfg).scores);
}

TEST(LimeGlobalTest, AbortsWhenMostInstancesFail) {
  const auto f = scalar_model([](auto r) {
    if (r[0] > -100) throw Error(ErrorKind::kExplanation, "boom");
    return 0.0;
  });
  ExplainerConfig cfg;
  cfg.lime_samples_per_instance = 50;
  EXPECT_THROW(lime_global(f, gaussian_rows(5, 2, 1), unit_stats(2), cfg), Error);
}

TEST(PermutationTest, IgnoredFeatureScoresZero) {
  const Matrix x = gaussian_rows(300, 3, 4);
  std::vector<int> y(300);
  for (std::size_t i = 0; i < 300; ++i) y[i] = x(i, 0) + x(i, 2) > 0 ? 1 : 0;
  const PredictFn predict = [](const Matrix& rows) {
    std::vector<int> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = rows(i, 0) + rows(i, 2) > 0 ? 1 : 0;
    return out;
  };
  const ImportanceVector iv = permutation_importance(predict, x, y, 5, 1);
  EXPECT_EQ(iv.scores[1], 0.0);
  EXPECT_GT(iv.scores[0], 0.1);
  EXPECT_EQ(iv.method, ExplainerMethod::kPermutation);
}

TEST(PermutationTest, PerfectSingleFeatureClassifierLosesHalf) {
  const std::size_t n = 2000;
  Matrix x(n, 1);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    x(i, 0) = y[i] == 1 ? 1.0 : -1.0;
  }
  const PredictFn predict = [](const Matrix& rows) {
    std::vector<int> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = rows(i, 0) > 0 ? 1 : 0;
    return out;
  };
  EXPECT_NEAR(permutation_importance(predict, x, y, 10, 3).scores[0], 0.5, 0.05);
}

TEST(PermutationTest, RoundsOnlyChangeAveragingAndStayNonNegative) {
  const Matrix x = gaussian_rows(100, 3, 9);
  std::vector<int> y(100);
  Rng rng(1);
  for (int& v : y) v = static_cast<int>(rng.below(2));
  const PredictFn predict = [](const Matrix& rows) {
    std::vector<int> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = rows(i, 1) > 0 ? 1 : 0;
    return out;
  };
  for (std::size_t rounds : {1u, 10u}) {
    const auto iv = permutation_importance(predict, x, y, rounds, 2);
    for (double s : iv.scores) EXPECT_GE(s, 0.0);
    EXPECT_EQ(iv.scores, permutation_importance(predict, x, y, rounds, 2).scores);
  }
}

TEST(ToRanksTest, Examples) {
  EXPECT_EQ(to_ranks(std::vector<double>{0.5, 0.2, 0.5}), (RankVector{1, 3, 2}));
  EXPECT_EQ(to_ranks(std::vector<double>{4, 3, 2, 1}), (RankVector{1, 2, 3, 4}));
  EXPECT_EQ(to_ranks(std::vector<double>{0, 0, 0}), (RankVector{1, 2, 3}));
}

TEST(ToRanksTest, AlwaysAPermutation) {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t p = 1 + rng.below(12);
    std::vector<double> scores(p);
    // Coarse values so ties are common.
    for (double& s : scores) s = static_cast<double>(rng.below(4));
    RankVector r = to_ranks(scores);
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        if (scores[a] > scores[b] || (scores[a] == scores[b] && a < b)) EXPECT_LT(r[a], r[b]);
      }
    }
    std::sort(r.begin(), r.end());
    for (std::size_t i = 0; i < p; ++i) EXPECT_EQ(r[i], static_cast<int>(i + 1));
  }
}

TEST(ImportanceCsvTest, HeaderAndRows) {
  const auto path = std::filesystem::temp_directory_path() / "featfuse_importance.csv";
  ImportanceVector iv;
  iv.scores = {0.1, 0.3};
  iv.method = ExplainerMethod::kLime;
  iv.model = "RF";
  write_importance_csv(path, {{iv, {"a", "b"}}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "feature,score,rank,method,model");
  std::getline(in, line);
  EXPECT_EQ(line, "a,0.1,2,lime,RF");
  std::getline(in, line);
  EXPECT_EQ(line, "b,0.3,1,lime,RF");
}

TEST(ExplainerConfigTest, Validation) {
  ExplainerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.background_size = 0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_EQ(parse_explainer_method("dalex"), ExplainerMethod::kPermutation);
  EXPECT_EQ(display_name(ExplainerMethod::kPermutation), "DALEX");
}

}  // namespace
}  // namespace featfuse
