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

#include "commands.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "svdnet/checkpoint.h"
#include "svdnet/config.h"
#include "svdnet/diagnostics.h"
#include "svdnet/error.h"
#include "svdnet/eval.h"
#include "svdnet/text.h"
#include "svdnet/trainer.h"

namespace svdnet::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// `eigen_dim` replaces the configured width before validation; the sweep
// sets its own widths.
TrainConfig ResolveConfig(const GlobalOptions &global,
                          std::optional<std::size_t> eigen_dim = {}) {
  TrainConfig config =
      global.config_path.empty() ? TrainConfig{} : LoadConfig(global.config_path);
  for (const auto &[key, value] : global.overrides) {
    SetConfigValue(config, key, value);
  }
  if (global.seed) config.schedule.seed = *global.seed;
  if (eigen_dim) config.eigen_dim = *eigen_dim;
  config.Validate();
  return config;
}

// Without a dataset path the default synthetic benchmark is used.
RetrievalDataset LoadData(const TrainConfig &config) {
  if (!config.dataset.empty()) return ReadDatasetCsv(config.dataset);
  spdlog::info("no dataset configured, generating the default synthetic set");
  return GenerateSynthetic(SyntheticConfig{});
}

TrainOptions OptionsFor(const TrainConfig &config) {
  TrainOptions options;
  options.eval_feature = config.eval_feature;
  options.l2_normalize = config.l2_normalize;
  options.method = config.decorr_method;
  return options;
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

ordered_json ConfigJson(const TrainConfig &config) {
  ordered_json out = ordered_json::object();
  std::istringstream in(FormatConfig(config));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

ordered_json SyntheticJson(const SyntheticConfig &c) {
  return {{"identities", c.identities},
          {"cameras", c.cameras},
          {"samples_per_camera", c.samples_per_camera},
          {"dim", c.dim},
          {"latent_dim", c.latent_dim},
          {"noise", c.noise},
          {"camera_offset", c.camera_offset},
          {"seed", c.seed}};
}

/*! Record of one invocation, written before any work starts. Every path in
 *  `artifacts` is checked again when the command finishes.
 */
class RunManifest {
 public:
  RunManifest(std::string command, const fs::path &out_dir)
      : command_(std::move(command)), out_dir_(out_dir) {
    json_["tool"] = "svdnet";
    json_["version"] = SVDNET_VERSION;
    json_["command"] = command_;
  }

  void SetConfig(const TrainConfig &config) {
    json_["seed"] = config.schedule.seed;
    json_["config"] = ConfigJson(config);
    json_["data"] = config.dataset.empty()
                        ? ordered_json{{"synthetic", SyntheticJson({})}}
                        : ordered_json{{"path", config.dataset}};
  }
  void Set(const std::string &key, ordered_json value) {
    json_[key] = std::move(value);
  }
  //! Registers an output relative to the output directory and returns its
  //! full path.
  fs::path Artifact(const std::string &name) {
    artifacts_.push_back(name);
    return out_dir_ / name;
  }

  void Write() {
    json_["artifacts"] = artifacts_;
    fs::create_directories(out_dir_);
    WriteText(out_dir_ / (command_ + "_manifest.json"), json_.dump(2) + "\n");
  }

  void Verify() const {
    for (const std::string &name : artifacts_) {
      if (!fs::exists(out_dir_ / name)) {
        throw Error("artifact missing after run: " + (out_dir_ / name).string());
      }
    }
  }

 private:
  std::string command_;
  fs::path out_dir_;
  ordered_json json_;
  std::vector<std::string> artifacts_;
};

struct CheckpointName {
  bool parsed = false;
  std::size_t rri_index = 0;
  Phase phase = Phase::kStep0;
};

CheckpointName ParseCheckpointName(const fs::path &path) {
  static const std::regex kPattern(
      R"(ckpt_rri(\d+)_(step0|decorrelate|restraint|relaxation)\.svdn)");
  std::smatch m;
  const std::string name = path.filename().string();
  if (!std::regex_match(name, m, kPattern)) return {};
  CheckpointName out{true, std::stoul(m[1].str()), Phase::kStep0};
  for (Phase p : {Phase::kStep0, Phase::kDecorrelate, Phase::kRestraint,
                  Phase::kRelaxation}) {
    if (m[2].str() == ToString(p)) out.phase = p;
  }
  return out;
}

std::vector<fs::path> ExpandCheckpoints(const std::vector<fs::path> &inputs) {
  std::vector<fs::path> out;
  for (const fs::path &in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto &entry : fs::directory_iterator(in)) {
        if (entry.path().extension() == ".svdn") out.push_back(entry.path());
      }
    } else if (fs::exists(in)) {
      out.push_back(in);
    } else {
      throw ValidationError("no such checkpoint: " + in.string());
    }
  }
  // Training order first, then anything unrecognized by name.
  std::stable_sort(out.begin(), out.end(), [](const fs::path &a, const fs::path &b) {
    const CheckpointName na = ParseCheckpointName(a);
    const CheckpointName nb = ParseCheckpointName(b);
    if (na.parsed != nb.parsed) return na.parsed;
    if (na.parsed && (na.rri_index != nb.rri_index || na.phase != nb.phase)) {
      return std::pair(na.rri_index, na.phase) < std::pair(nb.rri_index, nb.phase);
    }
    return a.filename() < b.filename();
  });
  if (out.empty()) throw ValidationError("diagnose: no checkpoints found");
  return out;
}

RankingReport EvaluateModel(const EigenModel &model, const TrainData &data,
                            const TrainConfig &config) {
  if (model.input_dim() != data.query_x.cols()) {
    throw ValidationError("checkpoint expects " + std::to_string(model.input_dim()) +
                          "-dim inputs but the dataset has " +
                          std::to_string(data.query_x.cols()));
  }
  return EvaluateFeatures(ExtractFeatures(model, data.query_x, config.eval_feature),
                          data.query,
                          ExtractFeatures(model, data.gallery_x, config.eval_feature),
                          data.gallery, config.l2_normalize);
}

double CmcAt(const RankingReport &r, std::size_t rank) {
  if (r.cmc.empty()) return 0.0;
  return r.cmc[std::min(rank, r.cmc.size()) - 1];
}

}  // namespace

int RunGen(const GlobalOptions &global, const GenOptions &options) {
  SyntheticConfig synthetic = options.synthetic;
  if (global.seed) synthetic.seed = *global.seed;
  RunManifest manifest("gen", global.out_dir);
  manifest.Set("seed", synthetic.seed);
  manifest.Set("synthetic", SyntheticJson(synthetic));
  const fs::path path = manifest.Artifact("dataset.csv");
  manifest.Write();

  const RetrievalDataset data = GenerateSynthetic(synthetic);
  WriteDatasetCsv(data, path);
  ReadDatasetCsv(path);
  manifest.Verify();
  spdlog::info("wrote {} rows to {}", data.features.rows(), path.string());
  return 0;
}

int RunTrain(const GlobalOptions &global) {
  const TrainConfig config = ResolveConfig(global);
  const TrainData data = TrainData::From(LoadData(config));

  RunManifest manifest("train", global.out_dir);
  manifest.SetConfig(config);
  const fs::path config_path = manifest.Artifact("config.cfg");
  const fs::path ckpt_dir = manifest.Artifact("checkpoints");
  const fs::path trace_path = manifest.Artifact("trace.csv");
  const fs::path report_path = manifest.Artifact("report.txt");
  manifest.Write();
  WriteText(config_path, FormatConfig(config));
  fs::create_directories(ckpt_dir);

  TrainOptions options = OptionsFor(config);
  options.checkpoint_dir = ckpt_dir;
  // Partial artifacts are kept when training fails.
  RriTrainer trainer(InitModel(ShapeFor(data, config), config.schedule.seed), data,
                     config.schedule, options);
  try {
    trainer.Run();
  } catch (const Error &) {
    WriteText(trace_path, TraceToCsv(trainer.trace()));
    throw;
  }
  const RriTrace &trace = trainer.trace();
  WriteText(trace_path, TraceToCsv(trace));

  const RankingReport report = trainer.EvaluateRetrieval();
  std::ostringstream text;
  text << FormatReport(report) << "iterations " << trace.iterations
       << (trace.converged ? " (converged)" : " (not converged)") << "\n"
       << "final S(W) " << FormatReal(trace.records.back().s_of_w) << "\n";
  WriteText(report_path, text.str());
  std::cout << text.str();
  if (!trace.converged) {
    spdlog::warn("S(W) did not settle within max_rri = {}", config.schedule.max_rri);
  }
  for (const auto &entry : fs::directory_iterator(ckpt_dir)) {
    LoadCheckpoint(entry.path());
  }
  manifest.Verify();
  return 0;
}

int RunEval(const GlobalOptions &global, const EvalOptions &options) {
  const TrainConfig config = ResolveConfig(global);
  const TrainData data = TrainData::From(LoadData(config));
  RunManifest manifest("eval", global.out_dir);
  manifest.SetConfig(config);
  manifest.Set("checkpoint", options.checkpoint.string());
  const fs::path out_path = manifest.Artifact("eval.csv");
  manifest.Write();

  const EigenModel model = LoadCheckpoint(options.checkpoint);
  const RankingReport report = EvaluateModel(model, data, config);
  std::ostringstream csv;
  csv << "checkpoint,rank1,rank5,rank10,mAP,excluded_queries\n"
      << options.checkpoint.string() << ',' << FormatReal(CmcAt(report, 1)) << ','
      << FormatReal(CmcAt(report, 5)) << ',' << FormatReal(CmcAt(report, 10)) << ','
      << FormatReal(report.map) << ',' << report.excluded_queries << '\n';
  WriteText(out_path, csv.str());
  std::cout << FormatReport(report);
  manifest.Verify();
  return 0;
}

int RunDiagnose(const GlobalOptions &global, const DiagnoseOptions &options) {
  const TrainConfig config = ResolveConfig(global);
  const std::vector<fs::path> checkpoints = ExpandCheckpoints(options.inputs);
  const TrainData data = TrainData::From(LoadData(config));
  RunManifest manifest("diagnose", global.out_dir);
  manifest.SetConfig(config);
  const fs::path out_path = manifest.Artifact("diagnose.csv");
  manifest.Write();

  std::ostringstream csv;
  csv << "checkpoint,rri_index,phase,s_of_w,rank1,mAP\n";
  for (const fs::path &path : checkpoints) {
    const EigenModel model = LoadCheckpoint(path);
    const CheckpointName name = ParseCheckpointName(path);
    const RankingReport report = EvaluateModel(model, data, config);
    csv << path.filename().string() << ','
        << (name.parsed ? std::to_string(name.rri_index) : "") << ','
        << (name.parsed ? ToString(name.phase) : "") << ','
        << FormatReal(CorrelationOf(model.eigenlayer).value) << ','
        << FormatReal(report.rank1()) << ',' << FormatReal(report.map) << '\n';
  }
  WriteText(out_path, csv.str());
  std::cout << csv.str();
  manifest.Verify();
  return 0;
}

int RunCompare(const GlobalOptions &global, const CompareOptions &options) {
  const TrainConfig config = ResolveConfig(global);
  std::set<DecorrMethod> methods;
  for (const std::string &name : options.methods) {
    methods.insert(ParseDecorrMethod(name));
  }
  if (methods.empty()) methods.insert(AllDecorrMethods().begin(), AllDecorrMethods().end());
  const TrainData data = TrainData::From(LoadData(config));

  RunManifest manifest("compare", global.out_dir);
  manifest.SetConfig(config);
  ordered_json names = ordered_json::array();
  for (DecorrMethod m : AllDecorrMethods()) {
    if (methods.contains(m)) names.push_back(ToString(m));
  }
  manifest.Set("methods", names);
  const fs::path out_path = manifest.Artifact("compare.csv");
  manifest.Write();

  const auto rows = RunDecorrComparison(data, config, methods, OptionsFor(config));
  const std::string csv = ComparisonToCsv(rows);
  WriteText(out_path, csv);
  std::cout << csv;
  manifest.Verify();
  return 0;
}

int RunSweepDim(const GlobalOptions &global, const SweepOptions &options) {
  if (options.dims.empty()) throw ValidationError("sweep-dim: no dims given");
  const TrainConfig config = ResolveConfig(
      global, *std::min_element(options.dims.begin(), options.dims.end()));
  for (std::size_t d : options.dims) {
    TrainConfig c = config;
    c.eigen_dim = d;
    c.Validate();
  }
  const TrainData data = TrainData::From(LoadData(config));

  RunManifest manifest("sweep-dim", global.out_dir);
  manifest.SetConfig(config);
  manifest.Set("dims", options.dims);
  const fs::path out_path = manifest.Artifact("sweep_dim.csv");
  manifest.Write();

  std::ostringstream csv;
  csv << "dim,map_without_rri,map_with_rri,rank1_without_rri,rank1_with_rri,"
         "s_of_w_without_rri,s_of_w_with_rri,iterations,converged\n";
  for (std::size_t d : options.dims) {
    TrainConfig c = config;
    c.eigen_dim = d;
    const RriTrace with = TrainSvdNet(data, c, OptionsFor(c)).trace;
    const RriTrace without =
        TrainBaseline(data, c, with.iterations, OptionsFor(c)).trace;
    const TraceRecord &a = without.records.back();
    const TraceRecord &b = with.records.back();
    spdlog::info("sweep dim {:>4}: mAP {:.4f} without, {:.4f} with", d, a.map, b.map);
    csv << d << ',' << FormatReal(a.map) << ',' << FormatReal(b.map) << ','
        << FormatReal(a.rank1) << ',' << FormatReal(b.rank1) << ','
        << FormatReal(a.s_of_w) << ',' << FormatReal(b.s_of_w) << ','
        << with.iterations << ',' << (with.converged ? 1 : 0) << '\n';
  }
  WriteText(out_path, csv.str());
  std::cout << csv.str();
  manifest.Verify();
  return 0;
}

}  // namespace svdnet::cli
