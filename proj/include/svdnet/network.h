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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "svdnet/matrix.h"

namespace svdnet {

//! y = x * weight + bias, weight is in x out.
struct AffineLayer {
  Matrix weight;
  std::vector<double> bias;

  bool operator==(const AffineLayer &) const = default;
};

struct ModelShape {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims;  //!< backbone widths; last is n
  std::size_t eigen_dim = 0;             //!< k
  std::size_t classes = 0;               //!< c
};

/*! Backbone of affine+ReLU layers, a bias-free linear Eigenlayer, and a
 *  linear classifier.
 *
 *      x -> [affine, relu]* -> h -> h * W -> f -> f * Wc + bc -> logits
 */
struct EigenModel {
  std::vector<AffineLayer> backbone;
  Matrix eigenlayer;  //!< n x k, no bias, no activation
  AffineLayer classifier;

  std::size_t input_dim() const { return backbone.front().weight.rows(); }
  std::size_t feature_dim() const { return eigenlayer.rows(); }
  std::size_t eigen_dim() const { return eigenlayer.cols(); }
  std::size_t classes() const { return classifier.weight.cols(); }
  std::size_t ParameterCount() const;

  //! Throws ValidationError when consecutive layer shapes disagree.
  void Validate() const;

  bool operator==(const EigenModel &) const = default;
};

/*! Fan-in uniform initialization: every weight is drawn from
 *  U(-sqrt(6/fan_in), sqrt(6/fan_in)); biases start at zero.
 */
EigenModel InitModel(const ModelShape &shape, std::uint64_t seed);

struct FreezeMask {
  bool eigenlayer_frozen = false;
};

struct ForwardResult {
  Matrix h;       //!< Eigenlayer input, m x n
  Matrix f;       //!< Eigenlayer output, m x k
  Matrix logits;  //!< m x c
};

ForwardResult Forward(const EigenModel &model, const Matrix &batch);

//! Gradients laid out exactly like the model parameters.
struct ModelGrads {
  std::vector<AffineLayer> backbone;
  Matrix eigenlayer;
  AffineLayer classifier;
};

struct LossAndGrads {
  double loss = 0.0;  //!< mean softmax cross-entropy
  ModelGrads grads;
};

/*! Mean softmax cross-entropy and its exact gradient.
 *
 *  When mask.eigenlayer_frozen is set the Eigenlayer gradient is all zeros;
 *  every other gradient is unaffected by the mask.
 */
LossAndGrads ComputeLossAndGrads(const EigenModel &model, const Matrix &batch,
                                 std::span<const std::size_t> labels,
                                 FreezeMask mask = {});

//! Mean cross-entropy without gradients.
double ComputeLoss(const EigenModel &model, const Matrix &batch,
                   std::span<const std::size_t> labels);

//! p <- p - lr * g for every parameter not frozen by `mask`.
void SgdStep(EigenModel &model, const ModelGrads &grads, double lr,
             FreezeMask mask = {});

enum class FeatureKind { kInput, kOutput };

//! Eigenlayer input (h) or output (f) features for retrieval.
Matrix ExtractFeatures(const EigenModel &model, const Matrix &batch,
                       FeatureKind which);

}  // namespace svdnet
