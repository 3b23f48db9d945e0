// Copyright 2026-present the svdnet authors
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

#include "svdnet/network.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "svdnet/error.h"
#include "svdnet/random.h"

namespace svdnet {

namespace {

Matrix UniformFanIn(std::size_t fan_in, std::size_t fan_out, Rng &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  Matrix m(fan_in, fan_out);
  for (double &v : m.data()) v = rng.Uniform(-limit, limit);
  return m;
}

void AddBias(Matrix &z, std::span<const double> bias) {
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
  }
}

std::vector<double> ColumnSums(const Matrix &m) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) out[c] += row[c];
  }
  return out;
}

void Relu(Matrix &z) {
  for (double &v : z.data()) v = v > 0.0 ? v : 0.0;
}

struct Activations {
  std::vector<Matrix> inputs;  // input of each backbone layer
  std::vector<Matrix> pre;     // pre-activation of each backbone layer
  ForwardResult out;
};

Activations RunForward(const EigenModel &model, const Matrix &batch) {
  if (batch.cols() != model.input_dim()) {
    throw ValidationError("forward: batch has " + std::to_string(batch.cols()) +
                          " columns, model expects " +
                          std::to_string(model.input_dim()));
  }
  Activations act{{}, {}, {batch, batch, batch}};
  Matrix a = batch;
  for (const AffineLayer &layer : model.backbone) {
    act.inputs.push_back(a);
    Matrix z = MatMul(a, layer.weight);
    AddBias(z, layer.bias);
    act.pre.push_back(z);
    Relu(z);
    a = std::move(z);
  }
  act.out.f = MatMul(a, model.eigenlayer);
  act.out.h = std::move(a);
  act.out.logits = MatMul(act.out.f, model.classifier.weight);
  AddBias(act.out.logits, model.classifier.bias);
  return act;
}

void CheckLabels(const EigenModel &model, const Matrix &batch,
                 std::span<const std::size_t> labels) {
  if (labels.size() != batch.rows()) {
    throw ValidationError("loss: " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(batch.rows()) +
                          " rows");
  }
  for (std::size_t y : labels) {
    if (y >= model.classes()) {
      throw ValidationError("loss: label " + std::to_string(y) +
                            " outside [0, " + std::to_string(model.classes()) +
                            ")");
    }
  }
}

// Row-wise softmax in place; returns the summed negative log-likelihood.
double SoftmaxNll(Matrix &logits, std::span<const std::size_t> labels) {
  double nll = 0.0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double &v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double &v : row) v /= sum;
    nll -= std::log(std::max(row[labels[r]], 1e-300));
  }
  return nll;
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

void Axpy(std::span<double> p, std::span<const double> g, double lr) {
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
}

}  // namespace

std::size_t EigenModel::ParameterCount() const {
  std::size_t n = eigenlayer.size() + classifier.weight.size() +
                  classifier.bias.size();
  for (const AffineLayer &l : backbone) n += l.weight.size() + l.bias.size();
  return n;
}

void EigenModel::Validate() const {
  if (backbone.empty()) throw ValidationError("model: backbone is empty");
  std::size_t width = backbone.front().weight.rows();
  for (std::size_t i = 0; i < backbone.size(); ++i) {
    const AffineLayer &l = backbone[i];
    if (l.weight.rows() != width || l.bias.size() != l.weight.cols()) {
      throw ValidationError("model: backbone layer " + std::to_string(i) +
                            " has inconsistent shape");
    }
    width = l.weight.cols();
  }
  if (eigenlayer.rows() != width) {
    throw ValidationError("model: eigenlayer rows do not match backbone width");
  }
  if (classifier.weight.rows() != eigenlayer.cols() ||
      classifier.bias.size() != classifier.weight.cols()) {
    throw ValidationError("model: classifier shape does not match eigenlayer");
  }
}

EigenModel InitModel(const ModelShape &shape, std::uint64_t seed) {
  if (shape.input_dim == 0 || shape.hidden_dims.empty() ||
      shape.eigen_dim == 0 || shape.classes == 0) {
    throw ValidationError("model shape: every dimension must be positive");
  }
  Rng rng(seed);
  std::vector<AffineLayer> backbone;
  std::size_t width = shape.input_dim;
  for (std::size_t h : shape.hidden_dims) {
    if (h == 0) throw ValidationError("model shape: zero hidden width");
    backbone.push_back({UniformFanIn(width, h, rng), std::vector<double>(h)});
    width = h;
  }
  Matrix eigen = UniformFanIn(width, shape.eigen_dim, rng);
  AffineLayer classifier{UniformFanIn(shape.eigen_dim, shape.classes, rng),
                         std::vector<double>(shape.classes)};
  return {std::move(backbone), std::move(eigen), std::move(classifier)};
}

ForwardResult Forward(const EigenModel &model, const Matrix &batch) {
  return RunForward(model, batch).out;
}

LossAndGrads ComputeLossAndGrads(const EigenModel &model, const Matrix &batch,
                                 std::span<const std::size_t> labels,
                                 FreezeMask mask) {
  CheckLabels(model, batch, labels);
  Activations act = RunForward(model, batch);
  const double m = static_cast<double>(batch.rows());

  Matrix dlogits = std::move(act.out.logits);
  const double nll = SoftmaxNll(dlogits, labels);
  for (std::size_t r = 0; r < dlogits.rows(); ++r) {
    dlogits(r, labels[r]) -= 1.0;
  }
  dlogits = Scale(dlogits, 1.0 / m);

  LossAndGrads out{nll / m,
                   {{}, Matrix(model.eigenlayer.rows(), model.eigenlayer.cols()),
                    {MatMulTransA(act.out.f, dlogits), ColumnSums(dlogits)}}};

  const Matrix df = MatMulTransB(dlogits, model.classifier.weight);
  if (!mask.eigenlayer_frozen) {
    out.grads.eigenlayer = MatMulTransA(act.out.h, df);
  }
  Matrix dh = MatMulTransB(df, model.eigenlayer);

  out.grads.backbone.resize(model.backbone.size(),
                            {Matrix(1, 1), std::vector<double>()});
  for (std::size_t l = model.backbone.size(); l-- > 0;) {
    const Matrix &z = act.pre[l];
    for (std::size_t i = 0; i < dh.size(); ++i) {
      if (!(z.data()[i] > 0.0)) dh.data()[i] = 0.0;
    }
    out.grads.backbone[l] = {MatMulTransA(act.inputs[l], dh), ColumnSums(dh)};
    if (l > 0) dh = MatMulTransB(dh, model.backbone[l].weight);
  }
  return out;
}

double ComputeLoss(const EigenModel &model, const Matrix &batch,
                   std::span<const std::size_t> labels) {
  CheckLabels(model, batch, labels);
  Matrix logits = Forward(model, batch).logits;
  return SoftmaxNll(logits, labels) / static_cast<double>(batch.rows());
}

void SgdStep(EigenModel &model, const ModelGrads &grads, double lr,
             FreezeMask mask) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw ValidationError("sgd: learning rate must be finite and >= 0");
  }
  if (grads.backbone.size() != model.backbone.size() ||
      grads.eigenlayer.rows() != model.eigenlayer.rows() ||
      grads.eigenlayer.cols() != model.eigenlayer.cols() ||
      grads.classifier.weight.size() != model.classifier.weight.size() ||
      grads.classifier.bias.size() != model.classifier.bias.size()) {
    throw ValidationError("sgd: gradient shapes do not match the model");
  }
  bool finite = AllFinite(grads.eigenlayer.data()) &&
                AllFinite(grads.classifier.weight.data()) &&
                AllFinite(grads.classifier.bias);
  for (std::size_t i = 0; i < grads.backbone.size(); ++i) {
    const AffineLayer &g = grads.backbone[i];
    if (g.weight.size() != model.backbone[i].weight.size() ||
        g.bias.size() != model.backbone[i].bias.size()) {
      throw ValidationError("sgd: backbone gradient " + std::to_string(i) +
                            " has the wrong shape");
    }
    finite = finite && AllFinite(g.weight.data()) && AllFinite(g.bias);
  }
  if (!finite) throw NumericError("sgd: non-finite gradient");

  for (std::size_t i = 0; i < model.backbone.size(); ++i) {
    Axpy(model.backbone[i].weight.data(), grads.backbone[i].weight.data(), lr);
    Axpy(model.backbone[i].bias, grads.backbone[i].bias, lr);
  }
  if (!mask.eigenlayer_frozen) {
    Axpy(model.eigenlayer.data(), grads.eigenlayer.data(), lr);
  }
  Axpy(model.classifier.weight.data(), grads.classifier.weight.data(), lr);
  Axpy(model.classifier.bias, grads.classifier.bias, lr);
}

Matrix ExtractFeatures(const EigenModel &model, const Matrix &batch,
                       FeatureKind which) {
  ForwardResult r = Forward(model, batch);
  return which == FeatureKind::kInput ? std::move(r.h) : std::move(r.f);
}

}  // namespace svdnet
