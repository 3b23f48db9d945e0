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

#include <string>
#include <string_view>
#include <vector>

#include "svdnet/matrix.h"

namespace svdnet {

//! Weight-replacement rule applied at the start of every iteration.
enum class DecorrMethod {
  kOrig,  //!< keep W
  kUS,    //!< W = U S V^T  ->  U S
  kU,     //!< -> U
  kUVt,   //!< -> U V^T
  kQD,    //!< W = Q R  ->  Q diag(R)
};

std::string_view ToString(DecorrMethod method);
//! Accepts "Orig", "US", "U", "UVt", "QD" (case-insensitive).
DecorrMethod ParseDecorrMethod(std::string_view name);
const std::vector<DecorrMethod> &AllDecorrMethods();

/*! Replaces an n x k weight matrix (n >= k) by the chosen decorrelated form.
 *
 *  Every method except kOrig returns a matrix with mutually orthogonal
 *  columns; kU and kUVt columns are also unit length. kOrig returns a copy.
 *  kQD on a rank-deficient input throws DegeneracyError.
 */
Matrix ApplyDecorrelation(const Matrix &w, DecorrMethod method);

/*! Largest change in any pairwise feature distance when the projection
 *  changes from `w` to `w_new`.
 *
 *  Features are f = h * w; for every row pair (i, j) of h the Euclidean
 *  distance ||f_i - f_j|| is compared between the two projections.
 */
double DistancePreservationGap(const Matrix &w, const Matrix &w_new,
                               const Matrix &h);

//! Pairwise Euclidean distances between rows of h * w.
Matrix ProjectedDistances(const Matrix &w, const Matrix &h);

}  // namespace svdnet
