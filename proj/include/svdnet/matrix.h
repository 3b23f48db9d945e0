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
#include <initializer_list>
#include <span>
#include <vector>

namespace svdnet {

/*! Dense row-major matrix of doubles.
 *
 *  Shapes are always positive. Constructors that take data reject
 *  non-finite entries; element access is unchecked in release builds.
 */
class Matrix {
 public:
  //! Zero-filled rows x cols matrix.
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  //! Nested list, one inner list per row.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix Identity(std::size_t n);
  static Matrix Diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double &operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double> column(std::size_t c) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  //! Rows [first, first + count) as a new matrix.
  Matrix RowSlice(std::size_t first, std::size_t count) const;
  //! Rows picked by index, in the given order.
  Matrix GatherRows(std::span<const std::size_t> indices) const;

  bool AllFinite() const;
  //! Throws NumericError naming `what` when an entry is NaN or Inf.
  void CheckFinite(const char *what) const;

  bool operator==(const Matrix &other) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix Transpose(const Matrix &a);
//! a (m x k) times b (k x n).
Matrix MatMul(const Matrix &a, const Matrix &b);
//! a^T times b without forming the transpose.
Matrix MatMulTransA(const Matrix &a, const Matrix &b);
//! a times b^T without forming the transpose.
Matrix MatMulTransB(const Matrix &a, const Matrix &b);
Matrix Add(const Matrix &a, const Matrix &b);
Matrix Subtract(const Matrix &a, const Matrix &b);
Matrix Scale(const Matrix &a, double alpha);
//! Multiplies column j of a by diag[j].
Matrix ScaleColumns(const Matrix &a, std::span<const double> diag);
double FrobeniusNorm(const Matrix &a);

/*! Squared Euclidean distances between every row of a and every row of b.
 *
 *  Uses |x|^2 + |y|^2 - 2 x.y with tiny negative results clamped to zero.
 *  Rows that are bitwise identical yield exactly 0.
 */
Matrix PairwiseSqDist(const Matrix &a, const Matrix &b);

}  // namespace svdnet
