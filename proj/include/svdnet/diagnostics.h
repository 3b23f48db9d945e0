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
#include <span>

#include "svdnet/matrix.h"

namespace svdnet {

//! Orthogonality score of a weight matrix's columns.
struct CorrelationScore {
  double value = 0.0;  //!< in [1/k, 1]; 1 iff the gram matrix is diagonal
  std::size_t k = 0;   //!< number of columns scored
};

/*! Ratio of gram-matrix trace to the sum of absolute gram entries.
 *
 *  With G = W^T W, returns sum_i g_ii / sum_ij |g_ij|. Zero-norm columns
 *  contribute nothing to either sum and are logged as a warning. Throws
 *  DegeneracyError when every column is zero.
 */
CorrelationScore CorrelationOf(const Matrix &w);

inline constexpr double kDefaultStabilityEpsilon = 1e-3;

/*! True once the post-relaxation scores have settled.
 *
 *  Needs at least three entries, and the last two consecutive changes must
 *  each be smaller than `epsilon` in magnitude.
 */
bool RriConverged(std::span<const CorrelationScore> history,
                  double epsilon = kDefaultStabilityEpsilon);

}  // namespace svdnet
