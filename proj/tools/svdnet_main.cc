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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.h"
#include "svdnet/config.h"
#include "svdnet/error.h"

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalid = 2,
  kNumeric = 3,
};

}  // namespace

int main(int argc, char **argv) {
  using namespace svdnet;
  spdlog::set_default_logger(spdlog::stderr_color_st("svdnet"));

  CLI::App app{"Eigenlayer training with restraint/relaxation iterations"};
  app.set_version_flag("--version", std::string(SVDNET_VERSION));
  app.require_subcommand(1);

  cli::GlobalOptions global;
  std::string config_path;
  std::string out_dir = global.out_dir.string();
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Config file of key = value lines")
      ->check(CLI::ExistingFile);
  CLI::Option *seed_opt = app.add_option("--seed", seed, "Seed override");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_flag("-v,--verbose", global.verbose, "Debug logging");

  // Every config key is also a flag; flags win over the file.
  std::map<std::string, std::string> key_values;
  std::map<std::string, CLI::Option *> key_opts;
  for (const std::string &key : ConfigKeys()) {
    if (key == "seed") continue;
    key_opts[key] =
        app.add_option("--" + key, key_values[key], "Config key " + key)
            ->group("Config overrides");
  }

  cli::GenOptions gen;
  CLI::App *gen_cmd = app.add_subcommand("gen", "Write a synthetic dataset CSV");
  gen_cmd->add_option("--identities", gen.synthetic.identities)->capture_default_str();
  gen_cmd->add_option("--cameras", gen.synthetic.cameras)->capture_default_str();
  gen_cmd->add_option("--samples-per-camera", gen.synthetic.samples_per_camera)
      ->capture_default_str();
  gen_cmd->add_option("--dim", gen.synthetic.dim)->capture_default_str();
  gen_cmd->add_option("--latent-dim", gen.synthetic.latent_dim,
                      "Identity subspace rank, 0 for full")
      ->capture_default_str();
  gen_cmd->add_option("--noise", gen.synthetic.noise)->capture_default_str();
  gen_cmd->add_option("--camera-offset", gen.synthetic.camera_offset)
      ->capture_default_str();

  CLI::App *train_cmd = app.add_subcommand("train", "Step 0 plus RRI, with checkpoints");

  cli::EvalOptions eval;
  std::string eval_ckpt;
  CLI::App *eval_cmd = app.add_subcommand("eval", "Score a checkpoint on the dataset");
  eval_cmd->add_option("checkpoint", eval_ckpt, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);

  cli::DiagnoseOptions diagnose;
  std::vector<std::string> diagnose_inputs;
  CLI::App *diagnose_cmd =
      app.add_subcommand("diagnose", "S(W) and retrieval metrics per checkpoint");
  diagnose_cmd->add_option("checkpoints", diagnose_inputs, "Files or directories")
      ->required();

  cli::CompareOptions compare;
  CLI::App *compare_cmd =
      app.add_subcommand("compare", "Train once per decorrelation method");
  compare_cmd->add_option("--methods", compare.methods, "Subset of Orig,US,U,UVt,QD")
      ->delimiter(',');

  cli::SweepOptions sweep;
  CLI::App *sweep_cmd = app.add_subcommand(
      "sweep-dim", "Eigenlayer width sweep with and without RRI");
  sweep_cmd->add_option("--dims", sweep.dims, "Eigenlayer widths")
      ->delimiter(',')
      ->capture_default_str();

  // Global flags may also follow the subcommand.
  for (CLI::App *sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  if (global.verbose) spdlog::set_level(spdlog::level::debug);
  global.config_path = config_path;
  global.out_dir = out_dir;
  if (seed_opt->count() > 0) global.seed = seed;
  for (const auto &[key, opt] : key_opts) {
    if (opt->count() > 0) global.overrides[key] = key_values[key];
  }
  eval.checkpoint = eval_ckpt;
  diagnose.inputs.assign(diagnose_inputs.begin(), diagnose_inputs.end());

  try {
    if (gen_cmd->parsed()) return cli::RunGen(global, gen);
    if (train_cmd->parsed()) return cli::RunTrain(global);
    if (eval_cmd->parsed()) return cli::RunEval(global, eval);
    if (diagnose_cmd->parsed()) return cli::RunDiagnose(global, diagnose);
    if (compare_cmd->parsed()) return cli::RunCompare(global, compare);
    if (sweep_cmd->parsed()) return cli::RunSweepDim(global, sweep);
  } catch (const ValidationError &e) {
    spdlog::error("{}", e.what());
    return kInvalid;
  } catch (const NumericError &e) {
    spdlog::error("{}", e.what());
    return kNumeric;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kOk;
}
