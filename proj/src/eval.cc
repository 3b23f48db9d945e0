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

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "svdnet/error.h"

namespace svdnet {

RankedLists RankGallery(const Matrix &query, const Matrix &gallery) {
  if (query.cols() != gallery.cols()) {
    throw ValidationError("rank: query dim " + std::to_string(query.cols()) +
                          " != gallery dim " + std::to_string(gallery.cols()));
  }
  const Matrix dist = PairwiseSqDist(query, gallery);
  RankedLists out(query.rows());
  for (std::size_t q = 0; q < query.rows(); ++q) {
    auto &order = out[q];
    order.resize(gallery.rows());
    std::iota(order.begin(), order.end(), 0);
    auto row = dist.row(q);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return row[a] < row[b] || (row[a] == row[b] && a < b);
    });
  }
  return out;
}

RankingReport Evaluate(const Labels &query, const Labels &gallery,
                       const RankedLists &ranked) {
  if (ranked.size() != query.size()) {
    throw ValidationError("evaluate: one ranked list per query required");
  }
  const std::size_t ng = gallery.size();
  RankingReport report;
  std::vector<std::size_t> first_hit_histogram(ng, 0);
  std::vector<std::size_t> seen(ng, 0);

  for (std::size_t q = 0; q < ranked.size(); ++q) {
    const auto &list = ranked[q];
    if (list.size() != ng) {
      throw ValidationError("evaluate: ranked list " + std::to_string(q) +
                            " does not cover the gallery");
    }
    const int id = query.ids[q];
    const int cam = query.cameras[q];
    std::size_t pos = 0;  // position in the filtered list
    std::size_t hits = 0;
    double precision_sum = 0.0;
    std::size_t first_hit = ng;
    for (std::size_t g : list) {
      if (g >= ng) throw ValidationError("evaluate: gallery index out of range");
      if (seen[g] == q + 1) {
        throw ValidationError("evaluate: ranked list " + std::to_string(q) +
                              " repeats gallery index " + std::to_string(g));
      }
      seen[g] = q + 1;
      const bool same_id = gallery.ids[g] == id;
      if (same_id && gallery.cameras[g] == cam) continue;  // junk
      ++pos;
      if (same_id) {
        ++hits;
        precision_sum += static_cast<double>(hits) / static_cast<double>(pos);
        if (first_hit == ng) first_hit = pos - 1;
      }
    }
    if (hits == 0) {
      ++report.excluded_queries;
      continue;
    }
    report.per_query_ap.push_back(precision_sum / static_cast<double>(hits));
    ++first_hit_histogram[first_hit];
  }

  if (report.excluded_queries > 0) {
    spdlog::warn("evaluate: {} queries have no valid gallery positive",
                 report.excluded_queries);
  }
  const std::size_t scored = report.per_query_ap.size();
  report.cmc.assign(ng, 0.0);
  if (scored > 0) {
    std::size_t cumulative = 0;
    for (std::size_t r = 0; r < ng; ++r) {
      cumulative += first_hit_histogram[r];
      report.cmc[r] = static_cast<double>(cumulative) / static_cast<double>(scored);
    }
    report.map = std::accumulate(report.per_query_ap.begin(),
                                 report.per_query_ap.end(), 0.0) /
                 static_cast<double>(scored);
  }
  return report;
}

Matrix NormalizeRows(const Matrix &m) {
  Matrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double norm = 0.0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double &v : row) v /= norm;
    }
  }
  return out;
}

RankingReport EvaluateFeatures(const Matrix &query_feats, const Labels &query,
                               const Matrix &gallery_feats,
                               const Labels &gallery, bool l2_normalize) {
  if (query_feats.rows() != query.size() ||
      gallery_feats.rows() != gallery.size()) {
    throw ValidationError("evaluate: feature rows and labels disagree");
  }
  const RankedLists ranked =
      l2_normalize ? RankGallery(NormalizeRows(query_feats),
                                 NormalizeRows(gallery_feats))
                   : RankGallery(query_feats, gallery_feats);
  return Evaluate(query, gallery, ranked);
}

std::string FormatReport(const RankingReport &report) {
  auto at = [&](std::size_t r) {
    if (report.cmc.empty()) return 0.0;
    return report.cmc[std::min(r, report.cmc.size()) - 1];
  };
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-8s %-8s %-8s %-8s %-8s\n%-8.4f %-8.4f %-8.4f %-8.4f %-8zu\n",
                "rank-1", "rank-5", "rank-10", "mAP", "excluded", at(1), at(5),
                at(10), report.map, report.excluded_queries);
  return buf;
}

}  // namespace svdnet
