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
#include <string>
#include <vector>

#include "svdnet/dataset.h"
#include "svdnet/matrix.h"

namespace svdnet {

using RankedLists = std::vector<std::vector<std::size_t>>;

/*! For each query row, gallery indices in ascending Euclidean distance.
 *
 *  Equal distances are ordered by gallery index.
 */
RankedLists RankGallery(const Matrix &query, const Matrix &gallery);

struct RankingReport {
  std::vector<double> cmc;           //!< cmc[r] = hit rate within top r+1
  double map = 0.0;
  std::vector<double> per_query_ap;  //!< scored queries only
  std::size_t excluded_queries = 0;  //!< no valid positive after filtering

  double rank1() const { return cmc.empty() ? 0.0 : cmc.front(); }
};

/*! Scores ranked lists with same-identity-same-camera junk filtering.
 *
 *  For each query, gallery entries sharing both identity and camera are
 *  dropped; positives are remaining entries with the query identity. AP is
 *  the mean precision at each positive hit, CMC rank r counts queries whose
 *  first positive lies within the top r of the filtered list. Queries with
 *  no positive left are excluded and counted.
 */
RankingReport Evaluate(const Labels &query, const Labels &gallery,
                       const RankedLists &ranked);

//! Ranks and scores in one call, optionally L2-normalizing features first.
RankingReport EvaluateFeatures(const Matrix &query_feats, const Labels &query,
                               const Matrix &gallery_feats,
                               const Labels &gallery, bool l2_normalize = false);

Matrix NormalizeRows(const Matrix &m);

//! Fixed-width text table of rank-1/5/10 and mAP.
std::string FormatReport(const RankingReport &report);

}  // namespace svdnet
