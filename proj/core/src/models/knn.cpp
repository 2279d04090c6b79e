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

#include "models/classifier.hpp"

namespace featfuse::detail {
namespace {

class KnnClassifier final : public Classifier {
 public:
  KnnClassifier(KnnParams hp, Matrix x, std::vector<int> y, std::size_t n_classes)
      : hp_(hp), x_(std::move(x)), y_(std::move(y)), n_classes_(n_classes) {}

  std::size_t n_classes() const override { return n_classes_; }

  void predict_proba(const Matrix& rows, Matrix& out) const override {
    out = Matrix(rows.rows(), n_classes_);
    const std::size_t n = x_.rows();
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(hp_.k), n);
    const bool euclidean = hp_.minkowski_p == 2.0;
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t q = 0; q < rows.rows(); ++q) {
      const auto query = rows.row(q);
      for (std::size_t i = 0; i < n; ++i) {
        const auto ref = x_.row(i);
        double d = 0.0;
        if (euclidean) {
          for (std::size_t j = 0; j < ref.size(); ++j) {
            const double diff = query[j] - ref[j];
            d += diff * diff;
          }
        } else {
          for (std::size_t j = 0; j < ref.size(); ++j) {
            d += std::pow(std::fabs(query[j] - ref[j]), hp_.minkowski_p);
          }
        }
        dist[i] = {d, i};
      }
      // Equal distances resolve to the lower training index.
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
      std::sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k));
      auto dst = out.row(q);
      for (std::size_t i = 0; i < k; ++i) dst[y_[dist[i].second]] += 1.0 / static_cast<double>(k);
    }
  }

  nlohmann::json parameters() const override {
    return {{"n_classes", n_classes_},
            {"k", hp_.k},
            {"minkowski_p", hp_.minkowski_p},
            {"cols", x_.cols()},
            {"x", std::vector<double>(x_.data().begin(), x_.data().end())},
            {"y", y_}};
  }

 private:
  KnnParams hp_;
  Matrix x_;
  std::vector<int> y_;
  std::size_t n_classes_;
};

}  // namespace

ClassifierPtr fit_knn(const KnnParams& hp, const TrainingData& data) {
  return std::make_shared<KnnClassifier>(hp, data.x,
                                         std::vector<int>(data.y.begin(), data.y.end()),
                                         static_cast<std::size_t>(data.n_classes));
}

ClassifierPtr load_knn(const nlohmann::json& params) {
  KnnParams hp;
  hp.k = params.at("k").get<int>();
  hp.minkowski_p = params.at("minkowski_p").get<double>();
  const auto cols = params.at("cols").get<std::size_t>();
  const auto flat = params.at("x").get<std::vector<double>>();
  auto y = params.at("y").get<std::vector<int>>();
  if (cols == 0 || flat.size() != cols * y.size()) {
    throw Error(ErrorKind::kData, "malformed KNN parameters");
  }
  Matrix x(y.size(), cols);
  std::copy(flat.begin(), flat.end(), x.data().begin());
  return std::make_shared<KnnClassifier>(hp, std::move(x), std::move(y),
                                         params.at("n_classes").get<std::size_t>());
}

}  // namespace featfuse::detail
