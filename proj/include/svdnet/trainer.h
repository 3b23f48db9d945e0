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
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "svdnet/config.h"
#include "svdnet/dataset.h"
#include "svdnet/decorrelate.h"
#include "svdnet/diagnostics.h"
#include "svdnet/eval.h"
#include "svdnet/network.h"
#include "svdnet/random.h"

namespace svdnet {

enum class Phase { kStep0, kDecorrelate, kRestraint, kRelaxation };

std::string_view ToString(Phase phase);

//! Metrics measured at one phase boundary.
struct TraceRecord {
  std::size_t rri_index = 0;  //!< 0 for Step 0, then 1..T
  Phase phase = Phase::kStep0;
  double s_of_w = 0.0;
  double train_loss = 0.0;
  double rank1 = 0.0;
  double map = 0.0;

  bool operator==(const TraceRecord &) const = default;
};

struct RriTrace {
  std::vector<TraceRecord> records;
  bool converged = false;
  std::size_t iterations = 0;  //!< completed restraint/relaxation cycles

  //! Post-relaxation S(W) of each completed iteration.
  std::vector<CorrelationScore> RelaxationHistory() const;
};

//! CSV with header "rri_index,phase,s_of_w,train_loss,rank1,mAP".
std::string TraceToCsv(const RriTrace &trace);

//! Dataset split into the pieces a training run touches.
struct TrainData {
  ClassificationSet train;
  Matrix query_x;
  Labels query;
  Matrix gallery_x;
  Labels gallery;

  static TrainData From(const RetrievalDataset &data);
};

struct TrainOptions {
  FeatureKind eval_feature = FeatureKind::kOutput;
  bool l2_normalize = false;
  DecorrMethod method = DecorrMethod::kUS;
  //! Stop once the post-relaxation S(W) is stable. When false every run
  //! performs exactly max_rri iterations.
  bool stop_on_convergence = true;
  //! Checkpoints go here as ckpt_rri{t}_{phase}.svdn; empty disables them.
  std::filesystem::path checkpoint_dir;
};

ModelShape ShapeFor(const TrainData &data, const TrainConfig &config);

/*! Step 0 followed by restraint/relaxation iterations over one model.
 *
 *  Each iteration replaces the Eigenlayer with the configured
 *  decorrelation, trains restraint_epochs with the Eigenlayer frozen, then
 *  relaxation_epochs with everything free. A trace record (and checkpoint,
 *  when enabled) is produced at every phase boundary. The trainer is the
 *  only writer of its model.
 */
class RriTrainer {
 public:
  RriTrainer(EigenModel model, const TrainData &data, RriSchedule schedule,
             TrainOptions options = {});

  //! Fine-tunes everything for step0_epochs. Throws if called twice.
  const TraceRecord &Step0();

  //! Runs iterations until convergence or max_rri. Calls Step0 if needed.
  const RriTrace &Run();

  //! One restraint/relaxation iteration; returns its post-relaxation score.
  CorrelationScore Iterate();

  //! Trains `epochs` shuffled sweeps at `lr`.
  void TrainEpochs(std::size_t epochs, double lr, FreezeMask mask);

  //! Metrics of the current model without changing it.
  TraceRecord Measure(std::size_t rri_index, Phase phase) const;

  RankingReport EvaluateRetrieval() const;
  RankedLists RankQueries() const;

  const EigenModel &model() const { return model_; }
  const RriTrace &trace() const { return trace_; }
  EigenModel &&TakeModel() && { return std::move(model_); }

 private:
  const TraceRecord &Record(std::size_t rri_index, Phase phase);

  EigenModel model_;
  const TrainData &data_;
  RriSchedule schedule_;
  TrainOptions options_;
  Rng rng_;
  RriTrace trace_;
  bool step0_done_ = false;
  std::size_t epochs_done_ = 0;
};

struct TrainResult {
  EigenModel model;
  RriTrace trace;
};

//! Fresh model from config, Step 0, then the iteration loop.
TrainResult TrainSvdNet(const TrainData &data, const TrainConfig &config,
                        TrainOptions options);

/*! Equal-schedule reference without decorrelation: Step 0 then exactly
 *  `iterations` restraint/relaxation cycles with the weights left as learned.
 */
TrainResult TrainBaseline(const TrainData &data, const TrainConfig &config,
                          std::size_t iterations, TrainOptions options = {});

struct ComparisonRow {
  DecorrMethod method;
  double rank1 = 0.0;
  double map = 0.0;
  double s_of_w = 0.0;
};

/*! One model per method, each trained for exactly max_rri iterations with
 *  that method as the replacement rule, in the order of AllDecorrMethods.
 */
std::vector<ComparisonRow> RunDecorrComparison(
    const TrainData &data, const TrainConfig &config,
    const std::set<DecorrMethod> &methods, TrainOptions options = {});

std::string ComparisonToCsv(const std::vector<ComparisonRow> &rows);

/*! Linear softmax classifier on the raw inputs, trained for a fixed 100
 *  epochs at lr_step0 with the Step 0 batching; query and gallery are then
 *  ranked by their logits. A reference point for how separable the data is
 *  without any hidden layer.
 */
RankingReport LinearProbe(const TrainData &data, const RriSchedule &schedule);

}  // namespace svdnet
