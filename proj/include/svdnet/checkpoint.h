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

#include <cstdint>
#include <filesystem>
#include <string>

#include "svdnet/network.h"

namespace svdnet {

/*! Binary checkpoint layout, all integers and reals little-endian:
 *
 *    "SVDN"            4 bytes magic
 *    version           u16 (currently 1)
 *    layer count       u32
 *    per layer:
 *      role            u8  (0 backbone, 1 eigenlayer, 2 classifier)
 *      rows, cols      u32, u32
 *      weights         rows*cols f64, row-major
 *      has bias        u8  (0 or 1)
 *      bias            cols f64, present only when has bias = 1
 *
 *  Layers appear in forward order: backbone..., eigenlayer, classifier.
 */
inline constexpr std::uint16_t kCheckpointVersion = 1;

enum class LayerRole : std::uint8_t {
  kBackbone = 0,
  kEigenlayer = 1,
  kClassifier = 2,
};

std::string EncodeCheckpoint(const EigenModel &model);
//! Throws ValidationError on bad magic, version, truncation or layout.
EigenModel DecodeCheckpoint(const std::string &bytes);

void SaveCheckpoint(const EigenModel &model, const std::filesystem::path &path);
EigenModel LoadCheckpoint(const std::filesystem::path &path);

}  // namespace svdnet
