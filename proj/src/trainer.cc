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

#include "svdnet/trainer.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "svdnet/checkpoint.h"
#include "svdnet/error.h"
#include "svdnet/text.h"

namespace svdnet {

namespace {

// Keeps the shuffle stream independent of the initialization stream that
// InitModel draws from the same seed.
constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::string_view ToString(Phase phase) {
  switch (phase) {
    case Phase::kStep0:
      return "step0";
    case Phase::kDecorrelate:
      return "decorrelate";
    case Phase::kRestraint:
      return "restraint";
    case Phase::kRelaxation:
      return "relaxation";
  }
  return "?";
}

std::vector<CorrelationScore> RriTrace::RelaxationHistory() const {
  std::vector<CorrelationScore> out;
  for (const TraceRecord &r : records) {
    if (r.phase == Phase::kRelaxation) out.push_back({r.s_of_w, 0});
  }
  return out;
}

std::string TraceToCsv(const RriTrace &trace) {
  std::ostringstream out;
  out << "rri_index,phase,s_of_w,train_loss,rank1,mAP\n";
  for (const TraceRecord &r : trace.records) {
    out << r.rri_index << ',' << ToString(r.phase) << ',' << FormatReal(r.s_of_w)
        << ',' << FormatReal(r.train_loss) << ',' << FormatReal(r.rank1) << ','
        << FormatReal(r.map) << '\n';
  }
  return out.str();
}

TrainData TrainData::From(const RetrievalDataset &data) {
  data.Validate();
  return {TrainingSet(data), data.FeaturesOf(Split::kQuery),
          data.LabelsOf(Split::kQuery), data.FeaturesOf(Split::kGallery),
          data.LabelsOf(Split::kGallery)};
}

ModelShape ShapeFor(const TrainData &data, const TrainConfig &config) {
  config.Validate();
  return {data.train.x.cols(), config.hidden_dims, config.eigen_dim,
          data.train.classes};
}

RriTrainer::RriTrainer(EigenModel model, const TrainData &data,
                       RriSchedule schedule, TrainOptions options)
    : model_(std::move(model)),
      data_(data),
      schedule_(schedule),
      options_(std::move(options)),
      rng_(schedule.seed ^ kShuffleStream) {
  schedule_.Validate();
  model_.Validate();
  if (data_.train.x.cols() != model_.input_dim()) {
    throw ValidationError("trainer: data dim does not match model input");
  }
  if (data_.train.classes > model_.classes()) {
    throw ValidationError("trainer: more training classes than model outputs");
  }
  if (model_.feature_dim() < model_.eigen_dim()) {
    throw ValidationError("trainer: eigenlayer needs rows >= cols");
  }
}

void RriTrainer::TrainEpochs(std::size_t epochs, double lr, FreezeMask mask) {
  const std::size_t n = data_.train.x.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> labels;
  for (std::size_t e = 0; e < epochs; ++e, ++epochs_done_) {
    rng_.Shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += schedule_.batch_size) {
      const std::size_t count = std::min(schedule_.batch_size, n - start);
      const std::span<const std::size_t> idx(order.data() + start, count);
      const Matrix batch = data_.train.x.GatherRows(idx);
      labels.clear();
      for (std::size_t i : idx) labels.push_back(data_.train.y[i]);
      const LossAndGrads lg = ComputeLossAndGrads(model_, batch, labels, mask);
      if (!std::isfinite(lg.loss)) {
        throw NumericError("training diverged: loss is not finite in epoch " +
                           std::to_string(epochs_done_));
      }
      try {
        SgdStep(model_, lg.grads, lr, mask);
      } catch (const NumericError &err) {
        throw NumericError(std::string(err.what()) + " in epoch " +
                           std::to_string(epochs_done_));
      }
    }
  }
}

RankedLists RriTrainer::RankQueries() const {
  Matrix q = ExtractFeatures(model_, data_.query_x, options_.eval_feature);
  Matrix g = ExtractFeatures(model_, data_.gallery_x, options_.eval_feature);
  if (options_.l2_normalize) {
    q = NormalizeRows(q);
    g = NormalizeRows(g);
  }
  return RankGallery(q, g);
}

RankingReport RriTrainer::EvaluateRetrieval() const {
  return Evaluate(data_.query, data_.gallery, RankQueries());
}

TraceRecord RriTrainer::Measure(std::size_t rri_index, Phase phase) const {
  const RankingReport report = EvaluateRetrieval();
  return {rri_index,
          phase,
          CorrelationOf(model_.eigenlayer).value,
          ComputeLoss(model_, data_.train.x, data_.train.y),
          report.rank1(),
          report.map};
}

const TraceRecord &RriTrainer::Record(std::size_t rri_index, Phase phase) {
  trace_.records.push_back(Measure(rri_index, phase));
  const TraceRecord &rec = trace_.records.back();
  spdlog::debug("rri {} {:<11} S(W)={:.6f} loss={:.4f} rank1={:.4f} mAP={:.4f}",
                rri_index, ToString(phase), rec.s_of_w, rec.train_loss,
                rec.rank1, rec.map);
  if (!options_.checkpoint_dir.empty()) {
    SaveCheckpoint(model_, options_.checkpoint_dir /
                               ("ckpt_rri" + std::to_string(rri_index) + "_" +
                                std::string(ToString(phase)) + ".svdn"));
  }
  return rec;
}

const TraceRecord &RriTrainer::Step0() {
  if (step0_done_) throw Error("trainer: Step 0 already ran");
  TrainEpochs(schedule_.step0_epochs, schedule_.lr_step0, {false});
  step0_done_ = true;
  return Record(0, Phase::kStep0);
}

CorrelationScore RriTrainer::Iterate() {
  if (!step0_done_) throw Error("trainer: Step 0 must run before iterating");
  const std::size_t t = trace_.iterations + 1;
  model_.eigenlayer = ApplyDecorrelation(model_.eigenlayer, options_.method);
  Record(t, Phase::kDecorrelate);

  TrainEpochs(schedule_.restraint_epochs, schedule_.lr_restraint, {true});
  Record(t, Phase::kRestraint);

  TrainEpochs(schedule_.relaxation_epochs, schedule_.lr_relaxation, {false});
  const TraceRecord &rec = Record(t, Phase::kRelaxation);
  trace_.iterations = t;
  return {rec.s_of_w, model_.eigen_dim()};
}

const RriTrace &RriTrainer::Run() {
  if (!step0_done_) Step0();
  std::vector<CorrelationScore> history;
  while (trace_.iterations < schedule_.max_rri) {
    history.push_back(Iterate());
    if (RriConverged(history, schedule_.epsilon_s)) {
      trace_.converged = true;
      if (options_.stop_on_convergence) break;
    }
  }
  return trace_;
}

TrainResult TrainSvdNet(const TrainData &data, const TrainConfig &config,
                        TrainOptions options) {
  RriTrainer trainer(InitModel(ShapeFor(data, config), config.schedule.seed),
                     data, config.schedule, std::move(options));
  RriTrace trace = trainer.Run();
  return {std::move(trainer).TakeModel(), std::move(trace)};
}

TrainResult TrainBaseline(const TrainData &data, const TrainConfig &config,
                          std::size_t iterations, TrainOptions options) {
  RriSchedule schedule = config.schedule;
  schedule.max_rri = std::max<std::size_t>(iterations, 1);
  options.method = DecorrMethod::kOrig;
  options.stop_on_convergence = false;
  RriTrainer trainer(InitModel(ShapeFor(data, config), schedule.seed), data,
                     schedule, std::move(options));
  trainer.Step0();
  for (std::size_t t = 0; t < iterations; ++t) trainer.Iterate();
  RriTrace trace = trainer.trace();
  return {std::move(trainer).TakeModel(), std::move(trace)};
}

std::vector<ComparisonRow> RunDecorrComparison(
    const TrainData &data, const TrainConfig &config,
    const std::set<DecorrMethod> &methods, TrainOptions options) {
  std::vector<ComparisonRow> rows;
  for (DecorrMethod method : AllDecorrMethods()) {
    if (!methods.contains(method)) continue;
    TrainOptions opts = options;
    opts.method = method;
    opts.stop_on_convergence = false;
    RriTrainer trainer(InitModel(ShapeFor(data, config), config.schedule.seed),
                       data, config.schedule, opts);
    const RriTrace &trace = trainer.Run();
    const TraceRecord &last = trace.records.back();
    rows.push_back({method, last.rank1, last.map, last.s_of_w});
    spdlog::info("compare {:<4} rank1={:.4f} mAP={:.4f} S(W)={:.4f}",
                 ToString(method), last.rank1, last.map, last.s_of_w);
  }
  return rows;
}

std::string ComparisonToCsv(const std::vector<ComparisonRow> &rows) {
  std::ostringstream out;
  out << "method,rank1,mAP,s_of_w\n";
  for (const ComparisonRow &r : rows) {
    out << ToString(r.method) << ',' << FormatReal(r.rank1) << ','
        << FormatReal(r.map) << ',' << FormatReal(r.s_of_w) << '\n';
  }
  return out.str();
}

// A linear model needs more passes than Step 0 to settle on this data.
constexpr std::size_t kProbeEpochs = 100;

RankingReport LinearProbe(const TrainData &data, const RriSchedule &schedule) {
  schedule.Validate();
  const Matrix &x = data.train.x;
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t c = data.train.classes;
  Matrix weight(d, c);
  std::vector<double> bias(c, 0.0);
  Rng rng(schedule.seed ^ kShuffleStream);
  const double limit = std::sqrt(6.0 / static_cast<double>(d));
  for (double &v : weight.data()) v = rng.Uniform(-limit, limit);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t e = 0; e < kProbeEpochs; ++e) {
    rng.Shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += schedule.batch_size) {
      const std::size_t count = std::min(schedule.batch_size, n - start);
      const std::span<const std::size_t> idx(order.data() + start, count);
      const Matrix batch = x.GatherRows(idx);
      Matrix delta = MatMul(batch, weight);
      for (std::size_t i = 0; i < count; ++i) {
        std::span<double> row = delta.row(i);
        double mx = row[0];
        for (std::size_t j = 0; j < c; ++j) {
          row[j] += bias[j];
          mx = std::max(mx, row[j]);
        }
        double sum = 0.0;
        for (double &v : row) sum += (v = std::exp(v - mx));
        for (double &v : row) v /= sum * static_cast<double>(count);
        row[data.train.y[idx[i]]] -= 1.0 / static_cast<double>(count);
      }
      const Matrix grad = MatMulTransA(batch, delta);
      for (std::size_t i = 0; i < weight.size(); ++i) {
        weight.data()[i] -= schedule.lr_step0 * grad.data()[i];
      }
      for (std::size_t j = 0; j < c; ++j) {
        double g = 0.0;
        for (std::size_t i = 0; i < count; ++i) g += delta(i, j);
        bias[j] -= schedule.lr_step0 * g;
      }
    }
  }
  if (!weight.AllFinite()) throw NumericError("linear probe diverged");
  // The shared bias cancels in every distance, so only the weight matters.
  return Evaluate(data.query, data.gallery,
                  RankGallery(MatMul(data.query_x, weight),
                              MatMul(data.gallery_x, weight)));
}

}  // namespace svdnet
