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

#include "svdnet/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "svdnet/error.h"

namespace svdnet {

namespace {

constexpr int kMaxSweeps = 80;
constexpr double kEps = std::numeric_limits<double>::epsilon();

using Column = std::vector<double>;

double Dot(const Column &x, const Column &y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double Norm(const Column &x) { return std::sqrt(Dot(x, x)); }

void Rotate(Column &p, Column &q, double c, double s) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double xp = p[i];
    const double xq = q[i];
    p[i] = c * xp - s * xq;
    q[i] = s * xp + c * xq;
  }
}

// Fills `u` with a unit vector orthogonal to all of `basis`, trying the
// standard basis vectors in order and keeping the first that survives
// two passes of Gram-Schmidt with a healthy norm.
Column CompleteBasis(const std::vector<Column> &basis, std::size_t n) {
  for (std::size_t e = 0; e < n; ++e) {
    Column u(n, 0.0);
    u[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Column &b : basis) {
        const double proj = Dot(u, b);
        for (std::size_t i = 0; i < n; ++i) u[i] -= proj * b[i];
      }
    }
    const double norm = Norm(u);
    if (norm > 0.5) {
      for (double &v : u) v /= norm;
      return u;
    }
  }
  throw NumericError("svd: could not complete orthonormal basis");
}

}  // namespace

SvdFactors Svd(const Matrix &w) {
  const std::size_t n = w.rows();
  const std::size_t k = w.cols();
  if (n < k) {
    throw ValidationError("svd: expected rows >= cols, got " +
                          std::to_string(n) + "x" + std::to_string(k));
  }
  if (!w.AllFinite()) throw ValidationError("svd: non-finite input");

  std::vector<Column> a(k);
  std::vector<Column> v(k, Column(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    a[j] = w.column(j);
    v[j][j] = 1.0;
  }

  const double tol = kEps * static_cast<double>(n);
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double alpha = Dot(a[p], a[p]);
        const double beta = Dot(a[q], a[q]);
        const double gamma = Dot(a[p], a[q]);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::fabs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) {
          continue;
        }
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        Rotate(a[p], a[q], c, s);
        Rotate(v[p], v[q], c, s);
      }
    }
  }
  if (!converged) {
    throw NumericError("svd: one-sided Jacobi did not converge in " +
                       std::to_string(kMaxSweeps) + " sweeps");
  }

  std::vector<double> sigma(k);
  for (std::size_t j = 0; j < k; ++j) sigma[j] = Norm(a[j]);

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return sigma[x] > sigma[y];
  });

  const double smax = sigma[order[0]];
  const double zero_cut = smax * kEps * static_cast<double>(n);

  std::vector<Column> u_cols;
  u_cols.reserve(k);
  std::vector<bool> needs_completion(k, false);
  for (std::size_t idx = 0; idx < k; ++idx) {
    const std::size_t j = order[idx];
    if (sigma[j] > zero_cut && sigma[j] > 0.0) {
      Column u = a[j];
      for (double &x : u) x /= sigma[j];
      u_cols.push_back(std::move(u));
    } else {
      needs_completion[idx] = true;
      u_cols.emplace_back();
    }
  }
  // Near-zero singular values keep their value; only the left vector is
  // replaced by a direction orthogonal to the well-defined ones.
  for (std::size_t idx = 0; idx < k; ++idx) {
    if (!needs_completion[idx]) continue;
    std::vector<Column> basis;
    for (std::size_t o = 0; o < k; ++o) {
      if (!u_cols[o].empty()) basis.push_back(u_cols[o]);
    }
    u_cols[idx] = CompleteBasis(basis, n);
  }

  SvdFactors out{Matrix(n, k), std::vector<double>(k), Matrix(k, k)};
  for (std::size_t idx = 0; idx < k; ++idx) {
    const std::size_t j = order[idx];
    Column &u = u_cols[idx];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::fabs(u[i]) > std::fabs(u[arg])) arg = i;
    }
    const double sign = u[arg] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.u(i, idx) = sign * u[i];
    for (std::size_t i = 0; i < k; ++i) out.vt(idx, i) = sign * v[j][i];
    out.s[idx] = sigma[j];
  }
  return out;
}

QrFactors Qr(const Matrix &w) {
  const std::size_t n = w.rows();
  const std::size_t k = w.cols();
  if (n < k) {
    throw ValidationError("qr: expected rows >= cols, got " +
                          std::to_string(n) + "x" + std::to_string(k));
  }
  if (!w.AllFinite()) throw ValidationError("qr: non-finite input");

  const double tol = 1e-12 * FrobeniusNorm(w);
  Matrix r = w;
  std::vector<Column> reflectors;
  reflectors.reserve(k);

  for (std::size_t j = 0; j < k; ++j) {
    Column x(n - j);
    for (std::size_t i = j; i < n; ++i) x[i - j] = r(i, j);
    const double norm_x = Norm(x);
    if (norm_x <= tol) {
      throw DegeneracyError("qr: rank-deficient input, column " +
                            std::to_string(j) + " is linearly dependent");
    }
    const double alpha = x[0] > 0.0 ? -norm_x : norm_x;
    Column vec = x;
    vec[0] -= alpha;
    const double vnorm = Norm(vec);
    if (vnorm > 0.0) {
      for (double &e : vec) e /= vnorm;
      for (std::size_t c = j; c < k; ++c) {
        double proj = 0.0;
        for (std::size_t i = j; i < n; ++i) proj += vec[i - j] * r(i, c);
        for (std::size_t i = j; i < n; ++i) r(i, c) -= 2.0 * proj * vec[i - j];
      }
    }
    for (std::size_t i = j + 1; i < n; ++i) r(i, j) = 0.0;
    reflectors.push_back(std::move(vec));
  }

  // Q = H_0 H_1 ... H_{k-1} applied to the first k columns of I.
  Matrix q(n, k);
  for (std::size_t j = 0; j < k; ++j) q(j, j) = 1.0;
  for (std::size_t jj = k; jj-- > 0;) {
    const Column &vec = reflectors[jj];
    for (std::size_t c = 0; c < k; ++c) {
      double proj = 0.0;
      for (std::size_t i = jj; i < n; ++i) proj += vec[i - jj] * q(i, c);
      if (proj == 0.0) continue;
      for (std::size_t i = jj; i < n; ++i) q(i, c) -= 2.0 * proj * vec[i - jj];
    }
  }

  QrFactors out{std::move(q), Matrix(k, k)};
  for (std::size_t i = 0; i < k; ++i) {
    const double sign = r(i, i) < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = i; c < k; ++c) out.r(i, c) = sign * r(i, c);
    if (sign < 0.0) {
      for (std::size_t row = 0; row < n; ++row) out.q(row, i) = -out.q(row, i);
    }
  }
  return out;
}

Matrix Reconstruct(const SvdFactors &f) {
  return MatMul(ScaleColumns(f.u, f.s), f.vt);
}

}  // namespace svdnet
