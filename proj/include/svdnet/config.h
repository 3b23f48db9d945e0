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

#include "svdnet/decorrelate.h"
#include "svdnet/network.h"

namespace svdnet {

//! Phase lengths and learning rates of the restraint/relaxation schedule.
struct RriSchedule {
  std::size_t step0_epochs = 30;
  std::size_t restraint_epochs = 10;
  std::size_t relaxation_epochs = 10;
  std::size_t max_rri = 15;
  double lr_step0 = 0.05;
  double lr_restraint = 0.02;
  double lr_relaxation = 0.005;
  std::size_t batch_size = 32;
  double epsilon_s = 1e-3;
  std::uint64_t seed = 1;

  //! Throws ValidationError naming the first field out of range.
  void Validate() const;
};

//! Everything a training run needs besides the data itself.
struct TrainConfig {
  RriSchedule schedule;
  std::vector<std::size_t> hidden_dims = {128, 128};
  std::size_t eigen_dim = 16;
  std::string dataset;
  FeatureKind eval_feature = FeatureKind::kOutput;
  bool l2_normalize = false;
  DecorrMethod decorr_method = DecorrMethod::kUS;

  void Validate() const;
};

/*! Sets one field from its textual form.
 *
 *  Keys are the field names above (schedule fields unprefixed). Throws
 *  ValidationError naming the key when it is unknown or the value does not
 *  parse.
 */
void SetConfigValue(TrainConfig &config, std::string_view key,
                    std::string_view value);

//! Names accepted by SetConfigValue, in canonical order.
const std::vector<std::string> &ConfigKeys();

/*! Parses "key = value" lines; blank lines and lines starting with '#' are
 *  skipped. Unknown keys, duplicate keys and malformed values throw.
 */
TrainConfig ParseConfig(std::string_view text);
TrainConfig LoadConfig(const std::filesystem::path &path);

//! Canonical text form; ParseConfig(FormatConfig(c)) reproduces c.
std::string FormatConfig(const TrainConfig &config);

}  // namespace svdnet
