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

#include <gtest/gtest.h>

#include <cmath>

#include "svdnet/error.h"
#include "svdnet/eval.h"
#include "svdnet/linalg.h"
#include "test_support.h"

namespace svdnet {
namespace {

using testing::MatrixWithSpectrum;
using testing::NaiveMatMul;
using testing::OrthonormalityError;
using testing::RandomMatrix;

// Off-diagonal gram mass relative to the diagonal.
double GramOffDiagonal(const Matrix &w) {
  double off = 0.0;
  double diag = 0.0;
  for (std::size_t i = 0; i < w.cols(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      double dot = 0.0;
      for (std::size_t r = 0; r < w.rows(); ++r) dot += w(r, i) * w(r, j);
      (i == j ? diag : off) += std::fabs(dot);
    }
  }
  return off / diag;
}

double MaxRelativeDistanceChange(const Matrix &w, const Matrix &w_new,
                                 const Matrix &h) {
  const Matrix before = ProjectedDistances(w, h);
  const Matrix after = ProjectedDistances(w_new, h);
  double scale = 0.0;
  for (double v : before.data()) scale = std::max(scale, v);
  double worst = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    worst = std::max(worst, std::fabs(before.data()[i] - after.data()[i]));
  }
  return worst / scale;
}

TEST(DecorrMethodTest, ParseRoundTrip) {
  for (DecorrMethod m : AllDecorrMethods()) {
    EXPECT_EQ(ParseDecorrMethod(ToString(m)), m);
  }
  EXPECT_EQ(ParseDecorrMethod("uvt"), DecorrMethod::kUVt);
  EXPECT_THROW(ParseDecorrMethod("svd"), ValidationError);
  EXPECT_EQ(AllDecorrMethods().size(), 5u);
}

TEST(ApplyDecorrelationTest, OrigIsACopy) {
  const Matrix w = RandomMatrix(6, 3, 1);
  EXPECT_EQ(ApplyDecorrelation(w, DecorrMethod::kOrig), w);
}

TEST(ApplyDecorrelationTest, IdentityIsFixedByUS) {
  EXPECT_EQ(ApplyDecorrelation(Matrix::Identity(2), DecorrMethod::kUS),
            Matrix::Identity(2));
}

TEST(ApplyDecorrelationTest, OrthogonalColumnsForEveryMethod) {
  const Matrix w = RandomMatrix(10, 5, 3);
  for (DecorrMethod m : {DecorrMethod::kUS, DecorrMethod::kU,
                         DecorrMethod::kUVt, DecorrMethod::kQD}) {
    SCOPED_TRACE(std::string(ToString(m)));
    const Matrix out = ApplyDecorrelation(w, m);
    EXPECT_EQ(out.rows(), w.rows());
    EXPECT_EQ(out.cols(), w.cols());
    EXPECT_LT(GramOffDiagonal(out), 1e-12);
  }
  EXPECT_LT(OrthonormalityError(ApplyDecorrelation(w, DecorrMethod::kU)), 1e-10);
  EXPECT_LT(OrthonormalityError(ApplyDecorrelation(w, DecorrMethod::kUVt)), 1e-10);
}

TEST(ApplyDecorrelationTest, USColumnNormsAreSingularValues) {
  const std::vector<double> spectrum = {5.0, 3.0, 0.5};
  const Matrix w = MatrixWithSpectrum(7, spectrum, 8);
  const Matrix us = ApplyDecorrelation(w, DecorrMethod::kUS);
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < us.rows(); ++i) norm += us(i, j) * us(i, j);
    EXPECT_NEAR(std::sqrt(norm), spectrum[j], 1e-12 * spectrum[0]);
  }
}

TEST(ApplyDecorrelationTest, QDDiagonalIsNonNegative) {
  const Matrix w = RandomMatrix(8, 4, 12);
  const Matrix qd = ApplyDecorrelation(w, DecorrMethod::kQD);
  // Column j of Q diag(r) has norm r_jj, and its inner product with w_j is
  // r_jj^2 since w_j = sum_{i<=j} q_i r_ij.
  for (std::size_t j = 0; j < w.cols(); ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) dot += qd(i, j) * w(i, j);
    EXPECT_GT(dot, 0.0);
  }
}

TEST(ApplyDecorrelationTest, RejectsWideAndQDOnDegenerate) {
  EXPECT_THROW(ApplyDecorrelation(RandomMatrix(3, 4, 1), DecorrMethod::kUS),
               ValidationError);
  Matrix w = RandomMatrix(5, 3, 2);
  for (std::size_t i = 0; i < w.rows(); ++i) w(i, 2) = w(i, 0);
  EXPECT_THROW(ApplyDecorrelation(w, DecorrMethod::kQD), DegeneracyError);
  EXPECT_NO_THROW(ApplyDecorrelation(w, DecorrMethod::kUS));
}

TEST(DistancePreservationTest, KnownSmallInstance) {
  // W = diag(2, 1) is already US; any h keeps the same distances.
  const Matrix w{{2, 0}, {0, 1}};
  const Matrix h{{1, 0}, {0, 1}, {1, 1}};
  EXPECT_EQ(DistancePreservationGap(w, ApplyDecorrelation(w, DecorrMethod::kUS), h),
            0.0);
  const Matrix d = ProjectedDistances(w, h);
  EXPECT_DOUBLE_EQ(d(0, 1), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(d(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(d(1, 2), 2.0);
}

TEST(DistancePreservationTest, USPreservesDistancesAndRankings) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SCOPED_TRACE(seed);
    const std::size_t k = 2 + seed % 7;
    const std::size_t n = k + seed % 6;
    const Matrix w = RandomMatrix(n, k, 5000 + seed);
    const Matrix h = RandomMatrix(12, n, 9000 + seed);
    const Matrix us = ApplyDecorrelation(w, DecorrMethod::kUS);
    EXPECT_LE(MaxRelativeDistanceChange(w, us, h), 1e-7);

    const Matrix q = h.RowSlice(0, 4);
    const Matrix g = h.RowSlice(4, 8);
    EXPECT_EQ(RankGallery(MatMul(q, w), MatMul(g, w)),
              RankGallery(MatMul(q, us), MatMul(g, us)));
  }
}

TEST(DistancePreservationTest, CompetitorsChangeDistances) {
  const Matrix w = MatrixWithSpectrum(8, {4.0, 2.5, 1.5, 0.7}, 31);
  const Matrix h = RandomMatrix(10, 8, 32);
  for (DecorrMethod m : {DecorrMethod::kU, DecorrMethod::kUVt, DecorrMethod::kQD}) {
    SCOPED_TRACE(std::string(ToString(m)));
    EXPECT_GT(MaxRelativeDistanceChange(w, ApplyDecorrelation(w, m), h), 1e-3);
  }
}

TEST(DistancePreservationTest, ShapeMismatch) {
  const Matrix w = RandomMatrix(4, 2, 1);
  EXPECT_THROW(DistancePreservationGap(w, RandomMatrix(4, 3, 1), RandomMatrix(3, 4, 1)),
               ValidationError);
  EXPECT_THROW(ProjectedDistances(w, RandomMatrix(3, 5, 1)), ValidationError);
}

}  // namespace
}  // namespace svdnet
