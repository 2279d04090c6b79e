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

#include <cmath>

#include <Eigen/Dense>

#include "models/classifier.hpp"

namespace featfuse::detail {
namespace {

struct BinaryLogit {
  std::vector<double> w;
  double b = 0.0;
  bool converged = true;

  double decision(std::span<const double> row) const {
    double z = b;
    for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * row[j];
    return z;
  }
};

// Minimizes 0.5 * |w|^2 + C * sum_i s_i * logloss_i with Newton steps and a
// backtracking line search. The intercept is not penalized.
BinaryLogit fit_binary(const Matrix& x, const std::vector<double>& target,
                       const std::vector<double>& sample_weight, const LogisticParams& hp) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t d = p + 1;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));

  const auto objective = [&](const Eigen::VectorXd& th) {
    double f = 0.5 * th.head(static_cast<Eigen::Index>(p)).squaredNorm();
    for (std::size_t i = 0; i < n; ++i) {
      double z = th[static_cast<Eigen::Index>(p)];
      for (std::size_t j = 0; j < p; ++j) z += th[static_cast<Eigen::Index>(j)] * x(i, j);
      // log(1 + exp(z)) - t * z
      const double sp = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
      f += hp.c * sample_weight[i] * (sp - target[i] * z);
    }
    return f;
  };

  BinaryLogit model;
  model.converged = false;
  double f = objective(theta);
  for (int it = 0; it < hp.max_iter; ++it) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                              static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < p; ++j) {
      g[static_cast<Eigen::Index>(j)] = theta[static_cast<Eigen::Index>(j)];
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1.0;
    }
    Eigen::VectorXd xi(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) xi[static_cast<Eigen::Index>(j)] = x(i, j);
      xi[static_cast<Eigen::Index>(p)] = 1.0;
      const double z = theta.dot(xi);
      const double s = sigmoid(z);
      const double cw = hp.c * sample_weight[i];
      g += cw * (s - target[i]) * xi;
      h.selfadjointView<Eigen::Lower>().rankUpdate(xi, cw * s * (1.0 - s));
    }
    h = h.selfadjointView<Eigen::Lower>();
    h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) += 1e-10;
    if (g.lpNorm<Eigen::Infinity>() < hp.tolerance) {
      model.converged = true;
      break;
    }
    const Eigen::VectorXd step = h.ldlt().solve(g);
    double t = 1.0;
    const double slope = g.dot(step);
    bool accepted = false;
    while (t > 1e-12) {
      const Eigen::VectorXd candidate = theta - t * step;
      const double fc = objective(candidate);
      if (fc <= f - 1e-4 * t * slope) {
        theta = candidate;
        f = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No further decrease is representable; treat as converged.
      model.converged = true;
      break;
    }
  }
  model.w.assign(theta.data(), theta.data() + p);
  model.b = theta[static_cast<Eigen::Index>(p)];
  return model;
}

class LogisticClassifier final : public Classifier {
 public:
  LogisticClassifier(std::vector<BinaryLogit> models, std::size_t n_classes, bool warning)
      : models_(std::move(models)), n_classes_(n_classes), warning_(warning) {}

  std::size_t n_classes() const override { return n_classes_; }
  bool warning() const override { return warning_; }

  void predict_proba(const Matrix& rows, Matrix& out) const override {
    out = Matrix(rows.rows(), n_classes_);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      auto dst = out.row(i);
      if (n_classes_ == 2) {
        const double p1 = sigmoid(models_[0].decision(rows.row(i)));
        dst[0] = 1.0 - p1;
        dst[1] = p1;
        continue;
      }
      double total = 0.0;
      for (std::size_t c = 0; c < n_classes_; ++c) {
        dst[c] = sigmoid(models_[c].decision(rows.row(i)));
        total += dst[c];
      }
      for (double& v : dst) v /= total;
    }
  }

  nlohmann::json parameters() const override {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : models_) models.push_back({{"w", m.w}, {"b", m.b}});
    return {{"n_classes", n_classes_}, {"warning", warning_}, {"models", models}};
  }

 private:
  std::vector<BinaryLogit> models_;
  std::size_t n_classes_;
  bool warning_;
};

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

ClassifierPtr fit_logistic(const LogisticParams& hp, const TrainingData& data) {
  const std::size_t n = data.x.rows();
  const std::size_t k = static_cast<std::size_t>(data.n_classes);
  const std::size_t n_models = k == 2 ? 1 : k;
  std::vector<BinaryLogit> models;
  bool warning = false;
  for (std::size_t m = 0; m < n_models; ++m) {
    const int positive = k == 2 ? 1 : static_cast<int>(m);
    std::vector<double> target(n);
    double n_pos = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      target[i] = data.y[i] == positive ? 1.0 : 0.0;
      n_pos += target[i];
    }
    const double n_neg = static_cast<double>(n) - n_pos;
    std::vector<double> weight(n, 1.0);
    if (hp.balanced && n_pos > 0.0 && n_neg > 0.0) {
      // n / (2 * count_of_class)
      for (std::size_t i = 0; i < n; ++i) {
        weight[i] = static_cast<double>(n) / (2.0 * (target[i] > 0.0 ? n_pos : n_neg));
      }
    }
    models.push_back(fit_binary(data.x, target, weight, hp));
    if (!models.back().converged) warning = true;
  }
  return std::make_shared<LogisticClassifier>(std::move(models), k, warning);
}

ClassifierPtr load_logistic(const nlohmann::json& params) {
  std::vector<BinaryLogit> models;
  for (const auto& doc : params.at("models")) {
    BinaryLogit m;
    m.w = doc.at("w").get<std::vector<double>>();
    m.b = doc.at("b").get<double>();
    models.push_back(std::move(m));
  }
  const auto k = params.at("n_classes").get<std::size_t>();
  if (models.size() != (k == 2 ? 1 : k)) throw Error(ErrorKind::kData, "malformed logistic model");
  return std::make_shared<LogisticClassifier>(std::move(models), k, params.value("warning", false));
}

}  // namespace featfuse::detail
