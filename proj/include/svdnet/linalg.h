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

#include <vector>

#include "svdnet/matrix.h"

namespace svdnet {

//! Thin SVD factors: input = u * diag(s) * vt.
struct SvdFactors {
  Matrix u;               //!< n x k, orthonormal columns
  std::vector<double> s;  //!< k values, non-increasing, non-negative
  Matrix vt;              //!< k x k, orthonormal rows
};

/*! Thin singular value decomposition of an n x k matrix with n >= k.
 *
 *  One-sided Jacobi (Hestenes) rotations orthogonalize the columns; the
 *  accumulated rotations give V. Singular values are sorted non-increasing
 *  with a stable order, so equal values keep their column order. Zero
 *  singular values are kept and their left vectors completed to an
 *  orthonormal set.
 *
 *  Sign convention: in every column of u the entry of largest magnitude is
 *  non-negative (lowest row index wins ties); the matching row of vt is
 *  flipped with it.
 *
 *  Throws ValidationError on n < k or non-finite input, NumericError when
 *  the sweeps do not converge.
 */
SvdFactors Svd(const Matrix &w);

struct QrFactors {
  Matrix q;  //!< n x k, orthonormal columns
  Matrix r;  //!< k x k, upper triangular with non-negative diagonal
};

/*! Thin Householder QR of an n x k matrix with n >= k.
 *
 *  Throws DegeneracyError naming the first column whose |r_ii| falls below
 *  1e-12 * ||w||_F.
 */
QrFactors Qr(const Matrix &w);

//! u * diag(s) * vt.
Matrix Reconstruct(const SvdFactors &f);

}  // namespace svdnet
