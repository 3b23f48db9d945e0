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
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "svdnet/matrix.h"

namespace svdnet {

enum class Split : std::uint8_t { kTrain, kQuery, kGallery };

std::string_view ToString(Split split);
Split ParseSplit(std::string_view name);

//! Identity and camera of each row of a feature matrix.
struct Labels {
  std::vector<int> ids;
  std::vector<int> cameras;

  std::size_t size() const { return ids.size(); }

  bool operator==(const Labels &) const = default;
};

/*! Labeled rows split into train / query / gallery.
 *
 *  Invariants (checked by Validate): the three splits are disjoint by
 *  construction (one tag per row), and every query identity has at least
 *  one gallery row captured by a different camera.
 */
struct RetrievalDataset {
  Matrix features;
  Labels labels;
  std::vector<Split> splits;

  std::size_t dim() const { return features.cols(); }
  void Validate() const;

  std::vector<std::size_t> RowsOf(Split split) const;
  Matrix FeaturesOf(Split split) const;
  Labels LabelsOf(Split split) const;

  bool operator==(const RetrievalDataset &) const = default;
};

struct SyntheticConfig {
  std::size_t identities = 32;
  std::size_t cameras = 4;
  std::size_t samples_per_camera = 6;
  std::size_t dim = 16;
  std::size_t latent_dim = 4;  //!< identity subspace rank; 0 means dim
  double noise = 0.3;          //!< isotropic per-sample noise stddev
  double camera_offset = 1.5;  //!< scale of the per-camera affine shift
  std::uint64_t seed = 7;
};

/*! Clustered identities seen through per-camera affine distortions.
 *
 *  Identity centers are Gaussian in a latent_dim subspace shared by all
 *  identities (a fixed random embedding into dim); camera c maps x to (I + A_c) x + b_c with
 *  A_c, b_c Gaussian scaled by camera_offset; each sample adds isotropic
 *  noise. The first half of the identities (rounded down, at least one)
 *  forms the training split. For each remaining identity, the first sample
 *  from every camera becomes a query and the rest go to the gallery; with a
 *  single sample per camera only camera 0 supplies the query.
 */
RetrievalDataset GenerateSynthetic(const SyntheticConfig &config);

//! CSV with header "id,camera,split,f0,...,f{d-1}".
void WriteDatasetCsv(const RetrievalDataset &data,
                     const std::filesystem::path &path);
std::string DatasetToCsv(const RetrievalDataset &data);
RetrievalDataset ReadDatasetCsv(const std::filesystem::path &path);
RetrievalDataset DatasetFromCsv(std::string_view text);

//! Train split with identities remapped to contiguous class indices.
struct ClassificationSet {
  Matrix x;
  std::vector<std::size_t> y;
  std::size_t classes = 0;
};

ClassificationSet TrainingSet(const RetrievalDataset &data);

}  // namespace svdnet
