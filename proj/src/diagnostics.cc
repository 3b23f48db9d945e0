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

#include "svdnet/diagnostics.h"

#include <spdlog/spdlog.h>

#include <cmath>

#include "svdnet/error.h"

namespace svdnet {

CorrelationScore CorrelationOf(const Matrix &w) {
  const Matrix gram = MatMulTransA(w, w);
  const std::size_t k = gram.rows();
  double trace = 0.0;
  double total = 0.0;
  std::size_t zero_columns = 0;
  for (std::size_t i = 0; i < k; ++i) {
    trace += gram(i, i);
    if (gram(i, i) == 0.0) ++zero_columns;
    for (std::size_t j = 0; j < k; ++j) total += std::fabs(gram(i, j));
  }
  if (zero_columns == k) {
    throw DegeneracyError("correlation score undefined for an all-zero matrix");
  }
  if (zero_columns > 0) {
    spdlog::warn("correlation score: {} of {} columns have zero norm",
                 zero_columns, k);
  }
  return {trace / total, k};
}

bool RriConverged(std::span<const CorrelationScore> history, double epsilon) {
  const std::size_t n = history.size();
  if (n < 3) return false;
  const double last = std::fabs(history[n - 1].value - history[n - 2].value);
  const double prev = std::fabs(history[n - 2].value - history[n - 3].value);
  return last < epsilon && prev < epsilon;
}

}  // namespace svdnet
