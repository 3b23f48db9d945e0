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

#include "svdnet/matrix.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "svdnet/error.h"

namespace svdnet {

namespace {

std::string ShapeString(const Matrix &m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void RequireSameShape(const Matrix &a, const Matrix &b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError(std::string(op) + ": shape mismatch " +
                          ShapeString(a) + " vs " + ShapeString(b));
  }
}

double Dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) {
    throw ValidationError("matrix dimensions must be positive");
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) {
    throw ValidationError("matrix dimensions must be positive");
  }
  if (data_.size() != rows * cols) {
    throw ValidationError("matrix data length " + std::to_string(data_.size()) +
                          " does not match shape " + ShapeString(*this));
  }
  if (!AllFinite()) throw ValidationError("matrix data contains NaN or Inf");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) {
    throw ValidationError("matrix dimensions must be positive");
  }
  data_.reserve(rows_ * cols_);
  for (const auto &r : rows) {
    if (r.size() != cols_) throw ValidationError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (!AllFinite()) throw ValidationError("matrix data contains NaN or Inf");
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::Diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::RowSlice(std::size_t first, std::size_t count) const {
  if (first + count > rows_ || count == 0) {
    throw ValidationError("row slice out of range");
  }
  Matrix out(count, cols_);
  std::copy_n(data_.begin() + first * cols_, count * cols_, out.data_.begin());
  return out;
}

Matrix Matrix::GatherRows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) throw ValidationError("row index out of range");
    std::copy_n(data_.begin() + indices[i] * cols_, cols_,
                out.data_.begin() + i * cols_);
  }
  return out;
}

bool Matrix::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Matrix::CheckFinite(const char *what) const {
  if (!AllFinite()) {
    throw NumericError(std::string(what) + ": non-finite entry");
  }
}

Matrix Transpose(const Matrix &a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  }
  return out;
}

Matrix MatMul(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.rows()) {
    throw ValidationError("matmul: inner dimensions differ " + ShapeString(a) +
                          " * " + ShapeString(b));
  }
  Matrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double *dst = out.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double *src = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

Matrix MatMulTransA(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows()) {
    throw ValidationError("matmul(a^T, b): row counts differ " +
                          ShapeString(a) + " vs " + ShapeString(b));
  }
  Matrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double *src = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      double *dst = out.row(i).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += aki * src[j];
    }
  }
  return out;
}

Matrix MatMulTransB(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.cols()) {
    throw ValidationError("matmul(a, b^T): column counts differ " +
                          ShapeString(a) + " vs " + ShapeString(b));
  }
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      out(i, j) = Dot(a.row(i), b.row(j));
    }
  }
  return out;
}

Matrix Add(const Matrix &a, const Matrix &b) {
  RequireSameShape(a, b, "add");
  Matrix out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

Matrix Subtract(const Matrix &a, const Matrix &b) {
  RequireSameShape(a, b, "subtract");
  Matrix out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  return out;
}

Matrix Scale(const Matrix &a, double alpha) {
  Matrix out = a;
  for (double &v : out.data()) v *= alpha;
  return out;
}

Matrix ScaleColumns(const Matrix &a, std::span<const double> diag) {
  if (diag.size() != a.cols()) {
    throw ValidationError("scale columns: expected " +
                          std::to_string(a.cols()) + " factors, got " +
                          std::to_string(diag.size()));
  }
  Matrix out = a;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) row[c] *= diag[c];
  }
  return out;
}

double FrobeniusNorm(const Matrix &a) {
  // Scaled accumulation avoids overflow for large entries.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : a.data()) {
    if (v == 0.0) continue;
    const double av = std::fabs(v);
    if (scale < av) {
      ssq = 1.0 + ssq * (scale / av) * (scale / av);
      scale = av;
    } else {
      ssq += (av / scale) * (av / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

Matrix PairwiseSqDist(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.cols()) {
    throw ValidationError("pairwise distance: feature dims differ " +
                          ShapeString(a) + " vs " + ShapeString(b));
  }
  std::vector<double> a_norm(a.rows());
  std::vector<double> b_norm(b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) a_norm[i] = Dot(a.row(i), a.row(i));
  for (std::size_t j = 0; j < b.rows(); ++j) b_norm[j] = Dot(b.row(j), b.row(j));

  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double d = a_norm[i] + b_norm[j] - 2.0 * Dot(a.row(i), b.row(j));
      out(i, j) = d > 0.0 ? d : 0.0;
    }
  }
  return out;
}

}  // namespace svdnet
