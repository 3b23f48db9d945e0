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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svdnet/dataset.h"
#include "svdnet/decorrelate.h"

namespace svdnet::cli {

//! Options shared by every subcommand.
struct GlobalOptions {
  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "out";
  //! Config keys given as flags; applied after the config file.
  std::map<std::string, std::string> overrides;
  bool verbose = false;
};

struct GenOptions {
  SyntheticConfig synthetic;
};

struct EvalOptions {
  std::filesystem::path checkpoint;
};

struct DiagnoseOptions {
  //! Checkpoint files, or directories scanned for *.svdn.
  std::vector<std::filesystem::path> inputs;
};

struct CompareOptions {
  std::vector<std::string> methods;  //!< empty means all
};

struct SweepOptions {
  std::vector<std::size_t> dims = {4, 8, 16, 32, 64, 128};
};

// Each command returns the process exit status; errors propagate as
// exceptions and are mapped to statuses by the caller.
int RunGen(const GlobalOptions &global, const GenOptions &options);
int RunTrain(const GlobalOptions &global);
int RunEval(const GlobalOptions &global, const EvalOptions &options);
int RunDiagnose(const GlobalOptions &global, const DiagnoseOptions &options);
int RunCompare(const GlobalOptions &global, const CompareOptions &options);
int RunSweepDim(const GlobalOptions &global, const SweepOptions &options);

}  // namespace svdnet::cli
