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

#include "svdnet/eval.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "svdnet/error.h"
#include "svdnet/random.h"
#include "test_support.h"

namespace svdnet {
namespace {

using testing::BruteForceEvaluate;
using testing::NaiveSqDist;
using testing::RandomRetrievalInstance;
using testing::RandomMatrix;

// Full stable sort of one row of the oracle distance matrix.
RankedLists SortOracle(const Matrix &q, const Matrix &g) {
  const Matrix d = NaiveSqDist(q, g);
  RankedLists out(q.rows());
  for (std::size_t i = 0; i < q.rows(); ++i) {
    out[i].resize(g.rows());
    std::iota(out[i].begin(), out[i].end(), 0);
    std::stable_sort(out[i].begin(), out[i].end(), [&](std::size_t a, std::size_t b) {
      return d(i, a) < d(i, b);
    });
  }
  return out;
}

TEST(RankGalleryTest, OneDimensionalExample) {
  const Matrix q{{0.0}};
  const Matrix g{{3.0}, {-1.0}, {2.0}};
  EXPECT_EQ(RankGallery(q, g), (RankedLists{{1, 2, 0}}));
}

TEST(RankGalleryTest, ExactCopyRanksFirst) {
  const Matrix g = RandomMatrix(10, 4, 1);
  const Matrix q = g.RowSlice(6, 1);
  EXPECT_EQ(RankGallery(q, g)[0][0], 6u);
}

TEST(RankGalleryTest, TiesBreakByIndex) {
  const Matrix q{{0.0, 0.0}};
  const Matrix g{{1.0, 0.0}, {0.0, -1.0}, {0.0, 1.0}, {0.5, 0.0}};
  EXPECT_EQ(RankGallery(q, g), (RankedLists{{3, 0, 1, 2}}));
}

TEST(RankGalleryTest, MatchesSortOracle) {
  const Matrix q = RandomMatrix(20, 8, 2);
  const Matrix g = RandomMatrix(30, 8, 3);
  EXPECT_EQ(RankGallery(q, g), SortOracle(q, g));
  EXPECT_THROW(RankGallery(q, RandomMatrix(3, 7, 1)), ValidationError);
}

TEST(EvaluateTest, SingleQueryPerfectHit) {
  const Labels query{{1}, {0}};
  const Labels gallery{{1, 2, 3}, {1, 1, 1}};
  const RankingReport r = Evaluate(query, gallery, {{0, 1, 2}});
  EXPECT_EQ(r.map, 1.0);
  EXPECT_EQ(r.cmc, (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(r.rank1(), 1.0);
}

TEST(EvaluateTest, HitsAtOneAndThree) {
  const Labels query{{1}, {0}};
  const Labels gallery{{1, 2, 1, 3}, {1, 1, 1, 1}};
  const RankingReport r = Evaluate(query, gallery, {{0, 1, 2, 3}});
  ASSERT_EQ(r.per_query_ap.size(), 1u);
  EXPECT_NEAR(r.per_query_ap[0], 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(r.map, 5.0 / 6.0, 1e-15);
}

TEST(EvaluateTest, JunkIsRemovedBeforeScoring) {
  // Gallery 0 shares identity and camera with the query and is dropped, so
  // the first real positive (gallery 2) sits at filtered rank 2.
  const Labels query{{1}, {0}};
  const Labels gallery{{1, 5, 1}, {0, 1, 2}};
  const RankingReport r = Evaluate(query, gallery, {{0, 1, 2}});
  EXPECT_NEAR(r.map, 0.5, 1e-15);
  EXPECT_EQ(r.cmc[0], 0.0);
  EXPECT_EQ(r.cmc[1], 1.0);
  EXPECT_EQ(r.cmc[2], 1.0);
}

TEST(EvaluateTest, QueryWithoutValidPositiveIsExcluded) {
  const Labels query{{1, 2}, {0, 0}};
  const Labels gallery{{1, 2}, {0, 1}};
  const RankingReport r = Evaluate(query, gallery, {{0, 1}, {1, 0}});
  EXPECT_EQ(r.excluded_queries, 1u);
  ASSERT_EQ(r.per_query_ap.size(), 1u);
  EXPECT_EQ(r.map, 1.0);
}

TEST(EvaluateTest, RejectsIncompleteLists) {
  const Labels query{{1}, {0}};
  const Labels gallery{{1, 2}, {1, 1}};
  EXPECT_THROW(Evaluate(query, gallery, {{0}}), ValidationError);
  EXPECT_THROW(Evaluate(query, gallery, {{0, 0}}), ValidationError);
  EXPECT_THROW(Evaluate(query, gallery, {}), ValidationError);
}

TEST(EvaluateTest, MatchesBruteForceOracleOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SCOPED_TRACE(seed);
    const testing::RetrievalInstance in = RandomRetrievalInstance(1000 + seed);
    const RankingReport r = Evaluate(in.query, in.gallery, in.ranked);
    const testing::OracleReport o = BruteForceEvaluate(in.query, in.gallery, in.ranked);
    ASSERT_EQ(r.per_query_ap.size(), o.ap.size());
    for (std::size_t i = 0; i < o.ap.size(); ++i) {
      EXPECT_NEAR(r.per_query_ap[i], o.ap[i], 1e-12);
    }
    EXPECT_NEAR(r.map, o.map, 1e-12);
    ASSERT_EQ(r.cmc.size(), o.cmc.size());
    for (std::size_t i = 0; i < o.cmc.size(); ++i) {
      EXPECT_NEAR(r.cmc[i], o.cmc[i], 1e-12);
    }
  }
}

TEST(EvaluateTest, CmcIsMonotoneAndReachesOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const testing::RetrievalInstance in = RandomRetrievalInstance(2000 + seed);
    const RankingReport r = Evaluate(in.query, in.gallery, in.ranked);
    for (std::size_t i = 1; i < r.cmc.size(); ++i) EXPECT_GE(r.cmc[i], r.cmc[i - 1]);
    if (!r.per_query_ap.empty()) {
      EXPECT_EQ(r.cmc.back(), 1.0);
    }
    const double mean =
        std::accumulate(r.per_query_ap.begin(), r.per_query_ap.end(), 0.0) /
        std::max<std::size_t>(r.per_query_ap.size(), 1);
    EXPECT_NEAR(r.map, mean, 1e-15);
  }
}

TEST(EvaluateFeaturesTest, InvariantToGalleryPermutation) {
  const Matrix q = RandomMatrix(5, 6, 10);
  const Matrix g = RandomMatrix(25, 6, 11);
  Labels ql{{0, 1, 2, 3, 4}, {0, 0, 1, 1, 0}};
  Labels gl;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    gl.ids.push_back(static_cast<int>(i % 5));
    gl.cameras.push_back(static_cast<int>(i % 3));
  }
  const RankingReport a = EvaluateFeatures(q, ql, g, gl);

  std::vector<std::size_t> perm(g.rows());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(3);
  rng.Shuffle(std::span<std::size_t>(perm));
  Labels pl;
  for (std::size_t i : perm) {
    pl.ids.push_back(gl.ids[i]);
    pl.cameras.push_back(gl.cameras[i]);
  }
  const RankingReport b = EvaluateFeatures(q, ql, g.GatherRows(perm), pl);
  EXPECT_NEAR(a.map, b.map, 1e-15);
  EXPECT_EQ(a.cmc, b.cmc);
}

TEST(EvaluateFeaturesTest, NormalizationChangesScale) {
  const Matrix m{{3.0, 4.0}, {0.0, 2.0}};
  const Matrix n = NormalizeRows(m);
  EXPECT_DOUBLE_EQ(n(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(n(0, 1), 0.8);
  EXPECT_DOUBLE_EQ(n(1, 1), 1.0);
  EXPECT_EQ(NormalizeRows(Matrix(1, 2)), Matrix(1, 2));
}

TEST(FormatReportTest, MentionsKeyNumbers) {
  RankingReport r;
  r.cmc = {0.5, 0.75, 1.0};
  r.map = 0.625;
  r.per_query_ap = {0.5, 0.75};
  const std::string text = FormatReport(r);
  EXPECT_NE(text.find("mAP"), std::string::npos);
  EXPECT_NE(text.find("0.6250"), std::string::npos);
}

}  // namespace
}  // namespace svdnet
