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
#include <limits>
#include <list>
#include <numeric>
#include <unordered_map>

#include "models/classifier.hpp"

namespace featfuse::detail {
namespace {

constexpr double kTau = 1e-12;

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    d += diff * diff;
  }
  return std::exp(-gamma * d);
}

// LRU cache of kernel matrix rows.
class KernelCache {
 public:
  KernelCache(const Matrix& x, double gamma, std::size_t max_bytes)
      : x_(x), gamma_(gamma) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.rows() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, max_bytes / row_bytes);
  }

  const std::vector<double>& row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    std::vector<double> values;
    if (lru_.size() >= capacity_) {
      values = std::move(lru_.back().second);
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    values.resize(x_.rows());
    const auto xi = x_.row(i);
    for (std::size_t t = 0; t < x_.rows(); ++t) values[t] = rbf(xi, x_.row(t), gamma_);
    lru_.emplace_front(i, std::move(values));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  using Entry = std::pair<std::size_t, std::vector<double>>;
  const Matrix& x_;
  double gamma_;
  std::size_t capacity_;
  std::list<Entry> lru_;
  std::unordered_map<std::size_t, std::list<Entry>::iterator> index_;
};

struct BinaryMachine {
  std::vector<double> coef;  // alpha_i * y_i for support vectors
  Matrix support;
  double rho = 0.0;
  // Platt sigmoid: P(+1 | f) = 1 / (1 + exp(a * f + b)).
  double platt_a = 0.0;
  double platt_b = 0.0;

  double decision(std::span<const double> row, double gamma) const {
    double f = -rho;
    for (std::size_t s = 0; s < coef.size(); ++s) f += coef[s] * rbf(row, support.row(s), gamma);
    return f;
  }

  double probability(double f) const {
    const double z = platt_a * f + platt_b;
    return z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
  }
};

struct SmoResult {
  std::vector<double> alpha;
  double rho = 0.0;
  bool converged = true;
};

// Dual SMO with second-order working-set selection.
SmoResult solve_smo(const Matrix& x, const std::vector<int>& y, double c, double gamma,
                    double tolerance, std::size_t max_iter) {
  const std::size_t n = x.rows();
  KernelCache cache(x, gamma, std::size_t{128} << 20);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  const auto yd = [&](std::size_t t) { return static_cast<double>(y[t]); };
  const auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0.0);
  };
  const auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0.0) || (y[t] < 0 && alpha[t] < c);
  };

  SmoResult result;
  std::size_t iter = 0;
  for (;; ++iter) {
    if (iter >= max_iter) {
      result.converged = false;
      break;
    }
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -yd(t) * grad[t] > gmax) {
        gmax = -yd(t) * grad[t];
        i = t;
      }
    }
    if (i == n) break;
    const auto& ki = cache.row(i);
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = yd(t) * grad[t];
      gmax2 = std::max(gmax2, v);
      const double b = gmax + v;
      if (b > 0.0) {
        double a = ki[i] + 1.0 - 2.0 * ki[t];  // K_tt = 1 for the RBF kernel
        if (a <= 0.0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj <= best_obj) {
          if (obj < best_obj || t < j) j = t;
          best_obj = obj;
        }
      }
    }
    if (gmax + gmax2 < tolerance || j == n) break;

    const auto& kj = cache.row(j);
    const double kii = ki[i];
    const double kjj = kj[j];
    const double kij = ki[j];
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = kii + kjj + 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = kii + kjj - 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    // Q_it = y_i y_t K_it.
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += yd(t) * (yd(i) * ki[t] * dai + yd(j) * kj[t] * daj);
    }
  }

  // Offset from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = yd(t) * grad[t];
    if (alpha[t] >= c) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  result.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  result.alpha = std::move(alpha);
  return result;
}

// Fits the Platt sigmoid by Newton's method with backtracking.
std::pair<double, double> fit_platt(const std::vector<double>& dec, const std::vector<int>& y) {
  double prior1 = 0.0;
  double prior0 = 0.0;
  for (int v : y) (v > 0 ? prior1 : prior0) += 1.0;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> target(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) target[i] = y[i] > 0 ? hi : lo;

  const auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < dec.size(); ++i) {
      const double z = dec[i] * a + b;
      f += z >= 0.0 ? target[i] * z + std::log1p(std::exp(-z))
                    : (target[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  for (int it = 0; it < 100; ++it) {
    double h11 = 1e-12;
    double h22 = 1e-12;
    double h21 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    for (std::size_t i = 0; i < dec.size(); ++i) {
      const double z = dec[i] * a + b;
      double p = 0.0;
      double q = 0.0;
      if (z >= 0.0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += dec[i] * dec[i] * d2;
      h22 += d2;
      h21 += dec[i] * d2;
      const double d1 = target[i] - p;
      g1 += dec[i] * d1;
      g2 += d1;
    }
    if (std::fabs(g1) < 1e-5 && std::fabs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= 1e-10) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step *= 0.5;
    }
    if (step < 1e-10) break;
  }
  return {a, b};
}

BinaryMachine fit_machine(const Matrix& x, const std::vector<int>& y, const SvmParams& hp,
                          double gamma, bool& warning) {
  const std::size_t max_iter =
      static_cast<std::size_t>(std::max(1, hp.max_iter_factor)) * std::max<std::size_t>(1, x.rows());
  const SmoResult smo = solve_smo(x, y, hp.c, gamma, hp.tolerance, max_iter);
  if (!smo.converged) warning = true;

  BinaryMachine m;
  m.rho = smo.rho;
  std::vector<std::size_t> sv;
  for (std::size_t t = 0; t < x.rows(); ++t) {
    if (smo.alpha[t] > 0.0) {
      sv.push_back(t);
      m.coef.push_back(smo.alpha[t] * static_cast<double>(y[t]));
    }
  }
  m.support = x.select_rows(sv);
  if (sv.empty()) m.support = Matrix(0, x.cols());

  std::vector<double> dec(x.rows());
  for (std::size_t t = 0; t < x.rows(); ++t) dec[t] = m.decision(x.row(t), gamma);
  std::tie(m.platt_a, m.platt_b) = fit_platt(dec, y);
  return m;
}

class SvmClassifier final : public Classifier {
 public:
  SvmClassifier(std::vector<BinaryMachine> machines, std::size_t n_classes, double gamma,
                bool warning)
      : machines_(std::move(machines)), n_classes_(n_classes), gamma_(gamma), warning_(warning) {}

  std::size_t n_classes() const override { return n_classes_; }
  bool warning() const override { return warning_; }

  void predict_proba(const Matrix& rows, Matrix& out) const override {
    out = Matrix(rows.rows(), n_classes_);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      auto dst = out.row(i);
      if (n_classes_ == 2) {
        const double p1 = machines_[0].probability(machines_[0].decision(rows.row(i), gamma_));
        dst[0] = 1.0 - p1;
        dst[1] = p1;
        continue;
      }
      double total = 0.0;
      for (std::size_t c = 0; c < n_classes_; ++c) {
        dst[c] = machines_[c].probability(machines_[c].decision(rows.row(i), gamma_));
        total += dst[c];
      }
      for (double& v : dst) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(n_classes_);
    }
  }

  nlohmann::json parameters() const override {
    nlohmann::json machines = nlohmann::json::array();
    for (const auto& m : machines_) {
      machines.push_back({{"coef", m.coef},
                          {"support", std::vector<double>(m.support.data().begin(),
                                                          m.support.data().end())},
                          {"cols", m.support.cols()},
                          {"rho", m.rho},
                          {"platt_a", m.platt_a},
                          {"platt_b", m.platt_b}});
    }
    return {{"n_classes", n_classes_}, {"gamma", gamma_}, {"warning", warning_},
            {"machines", machines}};
  }

 private:
  std::vector<BinaryMachine> machines_;
  std::size_t n_classes_;
  double gamma_;
  bool warning_;
};

}  // namespace

ClassifierPtr fit_svm(const SvmParams& hp, const TrainingData& data, std::uint64_t seed) {
  const double gamma = hp.gamma > 0.0 ? hp.gamma : 1.0 / static_cast<double>(data.x.cols());
  std::vector<std::size_t> rows(data.x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  if (hp.max_train_rows > 0 && rows.size() > static_cast<std::size_t>(hp.max_train_rows)) {
    Rng rng(derive_seed(seed, {fnv1a64("svm-subsample")}));
    rng.shuffle(std::span<std::size_t>(rows));
    rows.resize(static_cast<std::size_t>(hp.max_train_rows));
    std::sort(rows.begin(), rows.end());
  }
  const Matrix x = data.x.select_rows(rows);

  const std::size_t k = static_cast<std::size_t>(data.n_classes);
  const std::size_t n_machines = k == 2 ? 1 : k;
  std::vector<BinaryMachine> machines;
  bool warning = false;
  for (std::size_t m = 0; m < n_machines; ++m) {
    const int positive = k == 2 ? 1 : static_cast<int>(m);
    std::vector<int> y(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) y[t] = data.y[rows[t]] == positive ? 1 : -1;
    machines.push_back(fit_machine(x, y, hp, gamma, warning));
  }
  return std::make_shared<SvmClassifier>(std::move(machines), k, gamma, warning);
}

ClassifierPtr load_svm(const nlohmann::json& params) {
  std::vector<BinaryMachine> machines;
  for (const auto& doc : params.at("machines")) {
    BinaryMachine m;
    m.coef = doc.at("coef").get<std::vector<double>>();
    const auto cols = doc.at("cols").get<std::size_t>();
    const auto flat = doc.at("support").get<std::vector<double>>();
    if (flat.size() != cols * m.coef.size()) throw Error(ErrorKind::kData, "malformed SVM");
    m.support = Matrix(m.coef.size(), cols);
    std::copy(flat.begin(), flat.end(), m.support.data().begin());
    m.rho = doc.at("rho").get<double>();
    m.platt_a = doc.at("platt_a").get<double>();
    m.platt_b = doc.at("platt_b").get<double>();
    machines.push_back(std::move(m));
  }
  const auto k = params.at("n_classes").get<std::size_t>();
  if (machines.size() != (k == 2 ? 1 : k)) throw Error(ErrorKind::kData, "malformed SVM");
  return std::make_shared<SvmClassifier>(std::move(machines), k, params.at("gamma").get<double>(),
                                         params.value("warning", false));
}

}  // namespace featfuse::detail
