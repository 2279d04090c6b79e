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

#include "models/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "models/classifier.hpp"

namespace featfuse::detail {

MlpNetwork::MlpNetwork(std::size_t n_inputs, std::vector<int> hidden, std::size_t n_classes)
    : n_classes_(n_classes) {
  sizes_.push_back(n_inputs);
  for (int h : hidden) sizes_.push_back(static_cast<std::size_t>(h));
  sizes_.push_back(n_classes == 2 ? 1 : n_classes);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(offset);
    offset += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(offset, 0.0);
}

std::size_t MlpNetwork::hidden_units() const {
  return std::accumulate(sizes_.begin() + 1, sizes_.end() - 1, std::size_t{0});
}

void MlpNetwork::initialize(Rng& rng) {
  std::fill(params_.begin(), params_.end(), 0.0);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
    const std::size_t w = weight_offset(l);
    for (std::size_t i = 0; i < sizes_[l] * sizes_[l + 1]; ++i) {
      params_[w + i] = rng.uniform(-limit, limit);
    }
  }
}

void MlpNetwork::predict_proba(const Matrix& x, Matrix& out) const {
  out = Matrix(x.rows(), n_classes_);
  std::vector<double> a;
  std::vector<double> z;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    a.assign(row.begin(), row.end());
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const std::size_t in = sizes_[l];
      const std::size_t outn = sizes_[l + 1];
      z.assign(outn, 0.0);
      const double* w = params_.data() + weight_offset(l);
      const double* b = params_.data() + bias_offset(l);
      for (std::size_t o = 0; o < outn; ++o) {
        double s = b[o];
        for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * a[i];
        z[o] = s;
      }
      if (l + 2 < sizes_.size()) {
        for (double& v : z) v = std::max(0.0, v);
      }
      a.swap(z);
    }
    auto dst = out.row(r);
    if (n_classes_ == 2) {
      const double p = sigmoid(a[0]);
      dst[0] = 1.0 - p;
      dst[1] = p;
    } else {
      const double m = *std::max_element(a.begin(), a.end());
      double total = 0.0;
      for (std::size_t c = 0; c < n_classes_; ++c) {
        dst[c] = std::exp(a[c] - m);
        total += dst[c];
      }
      for (double& v : dst) v /= total;
    }
  }
}

double MlpNetwork::loss_and_gradient(const Matrix& x, std::span<const int> y,
                                     std::span<const double> dropout_scale,
                                     std::vector<double>* grad) const {
  const std::size_t n_layers = sizes_.size() - 1;
  const std::size_t hidden = hidden_units();
  if (grad != nullptr) grad->assign(params_.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(x.rows());

  // Per-layer activations (post-dropout) and pre-activations for one row.
  std::vector<std::vector<double>> act(n_layers + 1);
  std::vector<std::vector<double>> pre(n_layers);
  std::vector<double> delta;
  std::vector<double> prev_delta;
  double loss = 0.0;

  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    act[0].assign(row.begin(), row.end());
    std::size_t unit = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
      const std::size_t in = sizes_[l];
      const std::size_t outn = sizes_[l + 1];
      const double* w = params_.data() + weight_offset(l);
      const double* b = params_.data() + bias_offset(l);
      pre[l].assign(outn, 0.0);
      act[l + 1].assign(outn, 0.0);
      for (std::size_t o = 0; o < outn; ++o) {
        double s = b[o];
        for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * act[l][i];
        pre[l][o] = s;
        if (l + 1 < n_layers) {
          const double scale = dropout_scale.empty() ? 1.0 : dropout_scale[r * hidden + unit + o];
          act[l + 1][o] = std::max(0.0, s) * scale;
        } else {
          act[l + 1][o] = s;
        }
      }
      if (l + 1 < n_layers) unit += outn;
    }

    // Output gradient d(loss)/d(logits).
    const auto& logits = act[n_layers];
    delta.assign(logits.size(), 0.0);
    if (n_classes_ == 2) {
      const double z = logits[0];
      const double t = y[r] == 1 ? 1.0 : 0.0;
      // softplus(z) - t * z
      loss += (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - t * z;
      delta[0] = sigmoid(z) - t;
    } else {
      const double m = *std::max_element(logits.begin(), logits.end());
      double total = 0.0;
      for (double v : logits) total += std::exp(v - m);
      const double lse = m + std::log(total);
      loss += lse - logits[static_cast<std::size_t>(y[r])];
      for (std::size_t c = 0; c < logits.size(); ++c) {
        delta[c] = std::exp(logits[c] - lse) - (static_cast<int>(c) == y[r] ? 1.0 : 0.0);
      }
    }
    if (grad == nullptr) continue;

    std::size_t unit_end = hidden;
    for (std::size_t l = n_layers; l-- > 0;) {
      const std::size_t in = sizes_[l];
      const std::size_t outn = sizes_[l + 1];
      const double* w = params_.data() + weight_offset(l);
      double* gw = grad->data() + weight_offset(l);
      double* gb = grad->data() + bias_offset(l);
      for (std::size_t o = 0; o < outn; ++o) {
        const double d = delta[o] * inv_n;
        gb[o] += d;
        for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += d * act[l][i];
      }
      if (l == 0) break;
      // Back through the dropout scale and ReLU of layer l's input.
      const std::size_t unit_begin = unit_end - in;
      prev_delta.assign(in, 0.0);
      for (std::size_t i = 0; i < in; ++i) {
        double s = 0.0;
        for (std::size_t o = 0; o < outn; ++o) s += w[o * in + i] * delta[o];
        const double scale =
            dropout_scale.empty() ? 1.0 : dropout_scale[r * hidden + unit_begin + i];
        prev_delta[i] = pre[l - 1][i] > 0.0 ? s * scale : 0.0;
      }
      unit_end = unit_begin;
      delta.swap(prev_delta);
    }
  }
  return loss * inv_n;
}

namespace {

class MlpClassifier final : public Classifier {
 public:
  explicit MlpClassifier(MlpNetwork net) : net_(std::move(net)) {}

  std::size_t n_classes() const override { return net_.n_classes(); }

  void predict_proba(const Matrix& rows, Matrix& out) const override {
    net_.predict_proba(rows, out);
  }

  nlohmann::json parameters() const override {
    std::vector<std::size_t> hidden(net_.layer_sizes().begin() + 1, net_.layer_sizes().end() - 1);
    return {{"n_inputs", net_.n_inputs()},
            {"hidden", hidden},
            {"n_classes", net_.n_classes()},
            {"weights", net_.parameters()}};
  }

 private:
  MlpNetwork net_;
};

}  // namespace

ClassifierPtr fit_mlp(const MlpParams& hp, const TrainingData& data, std::uint64_t seed) {
  MlpNetwork net(data.x.cols(), hp.hidden, static_cast<std::size_t>(data.n_classes));
  Rng rng(seed);
  net.initialize(rng);

  auto& w = net.parameters();
  std::vector<double> m(w.size(), 0.0);
  std::vector<double> v(w.size(), 0.0);
  std::vector<double> grad;
  std::vector<std::size_t> order(data.x.rows());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = static_cast<std::size_t>(hp.batch_size);
  const std::size_t hidden = net.hidden_units();
  const double keep = 1.0 - hp.dropout;
  std::vector<double> scale;
  std::vector<int> batch_y;
  long step = 0;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const Matrix xb = data.x.select_rows(idx);
      batch_y.resize(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) batch_y[i] = data.y[idx[i]];
      scale.assign(idx.size() * hidden, 1.0);
      if (hp.dropout > 0.0) {
        for (double& s : scale) s = rng.uniform() < keep ? 1.0 / keep : 0.0;
      }
      net.loss_and_gradient(xb, batch_y, scale, &grad);

      ++step;
      const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < w.size(); ++k) {
        m[k] = hp.beta1 * m[k] + (1.0 - hp.beta1) * grad[k];
        v[k] = hp.beta2 * v[k] + (1.0 - hp.beta2) * grad[k] * grad[k];
        w[k] -= hp.learning_rate * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + hp.epsilon);
      }
    }
  }
  return std::make_shared<MlpClassifier>(std::move(net));
}

ClassifierPtr load_mlp(const nlohmann::json& params) {
  std::vector<int> hidden;
  for (const auto& h : params.at("hidden")) hidden.push_back(h.get<int>());
  MlpNetwork net(params.at("n_inputs").get<std::size_t>(), hidden,
                 params.at("n_classes").get<std::size_t>());
  const auto weights = params.at("weights").get<std::vector<double>>();
  if (weights.size() != net.parameters().size()) throw Error(ErrorKind::kData, "malformed MLP");
  net.parameters() = weights;
  return std::make_shared<MlpClassifier>(std::move(net));
}

}  // namespace featfuse::detail
