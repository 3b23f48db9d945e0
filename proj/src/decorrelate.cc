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

#include "svdnet/decorrelate.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "svdnet/error.h"
#include "svdnet/linalg.h"

namespace svdnet {

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view ToString(DecorrMethod method) {
  switch (method) {
    case DecorrMethod::kOrig:
      return "Orig";
    case DecorrMethod::kUS:
      return "US";
    case DecorrMethod::kU:
      return "U";
    case DecorrMethod::kUVt:
      return "UVt";
    case DecorrMethod::kQD:
      return "QD";
  }
  return "?";
}

DecorrMethod ParseDecorrMethod(std::string_view name) {
  const std::string key = Lower(name);
  for (DecorrMethod m : AllDecorrMethods()) {
    if (Lower(ToString(m)) == key) return m;
  }
  throw ValidationError("unknown decorrelation method '" + std::string(name) +
                        "' (expected Orig, US, U, UVt or QD)");
}

const std::vector<DecorrMethod> &AllDecorrMethods() {
  static const std::vector<DecorrMethod> kAll = {
      DecorrMethod::kOrig, DecorrMethod::kUS, DecorrMethod::kU,
      DecorrMethod::kUVt, DecorrMethod::kQD};
  return kAll;
}

Matrix ApplyDecorrelation(const Matrix &w, DecorrMethod method) {
  if (w.rows() < w.cols()) {
    throw ValidationError("decorrelate: weight matrix must have rows >= cols");
  }
  switch (method) {
    case DecorrMethod::kOrig:
      return w;
    case DecorrMethod::kUS: {
      const SvdFactors f = Svd(w);
      return ScaleColumns(f.u, f.s);
    }
    case DecorrMethod::kU:
      return Svd(w).u;
    case DecorrMethod::kUVt: {
      const SvdFactors f = Svd(w);
      return MatMul(f.u, f.vt);
    }
    case DecorrMethod::kQD: {
      const QrFactors f = Qr(w);
      std::vector<double> diag(w.cols());
      for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = f.r(i, i);
      return ScaleColumns(f.q, diag);
    }
  }
  throw ValidationError("decorrelate: invalid method");
}

Matrix ProjectedDistances(const Matrix &w, const Matrix &h) {
  const Matrix f = MatMul(h, w);
  const std::size_t m = f.rows();
  Matrix d(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double acc = 0.0;
      auto fi = f.row(i);
      auto fj = f.row(j);
      for (std::size_t c = 0; c < f.cols(); ++c) {
        const double diff = fi[c] - fj[c];
        acc += diff * diff;
      }
      d(i, j) = d(j, i) = std::sqrt(acc);
    }
  }
  return d;
}

double DistancePreservationGap(const Matrix &w, const Matrix &w_new,
                               const Matrix &h) {
  if (w.rows() != w_new.rows() || w.cols() != w_new.cols()) {
    throw ValidationError("distance gap: w and w_new shapes differ");
  }
  if (h.cols() != w.rows()) {
    throw ValidationError("distance gap: feature dim " +
                          std::to_string(h.cols()) + " does not match w rows " +
                          std::to_string(w.rows()));
  }
  const Matrix before = ProjectedDistances(w, h);
  const Matrix after = ProjectedDistances(w_new, h);
  double gap = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    gap = std::max(gap, std::fabs(before.data()[i] - after.data()[i]));
  }
  return gap;
}

}  // namespace svdnet
