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

// Acceptance checks. Prints one PASS/FAIL/INCONCLUSIVE line per criterion
// and exits non-zero when any criterion fails. Pass criterion numbers as
// arguments to run a subset.

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "svdnet/decorrelate.h"
#include "svdnet/diagnostics.h"
#include "svdnet/error.h"
#include "svdnet/eval.h"
#include "svdnet/trainer.h"
#include "test_support.h"

namespace svdnet {
namespace {

namespace fs = std::filesystem;
using testing::RandomMatrix;

enum class Verdict { kPass, kFail, kInconclusive };

struct Outcome {
  Verdict verdict = Verdict::kFail;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> check;
};

std::string Fmt(const char *format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

Outcome Judge(bool ok, std::string detail) {
  return {ok ? Verdict::kPass : Verdict::kFail, std::move(detail)};
}

// Largest relative change in any projected pairwise distance.
double RelativeGap(const Matrix &w, const Matrix &w_new, const Matrix &h) {
  const Matrix before = ProjectedDistances(w, h);
  double scale = 0.0;
  for (double v : before.data()) scale = std::max(scale, v);
  return DistancePreservationGap(w, w_new, h) / scale;
}

// Rankings may only differ between gallery items whose distances agree to
// within `tie`.
bool SameRankingUpToTies(const RankedLists &a, const RankedLists &b,
                         const Matrix &sq_dist, double tie) {
  for (std::size_t q = 0; q < a.size(); ++q) {
    for (std::size_t i = 0; i < a[q].size(); ++i) {
      if (a[q][i] == b[q][i]) continue;
      const double da = std::sqrt(sq_dist(q, a[q][i]));
      const double db = std::sqrt(sq_dist(q, b[q][i]));
      if (std::fabs(da - db) > tie) return false;
    }
  }
  return true;
}

Outcome DistancePreservation() {
  double worst = 0.0;
  std::size_t ranking_changes = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t k = 2 + seed % 15;
    const std::size_t n = k + seed % 9;
    const Matrix w = RandomMatrix(n, k, 10'000 + seed);
    const Matrix h = RandomMatrix(24, n, 20'000 + seed);
    const Matrix us = ApplyDecorrelation(w, DecorrMethod::kUS);
    worst = std::max(worst, RelativeGap(w, us, h));

    const Matrix q = MatMul(h.RowSlice(0, 6), w);
    const Matrix g = MatMul(h.RowSlice(6, 18), w);
    const RankedLists before = RankGallery(q, g);
    const RankedLists after =
        RankGallery(MatMul(h.RowSlice(0, 6), us), MatMul(h.RowSlice(6, 18), us));
    if (!SameRankingUpToTies(before, after, PairwiseSqDist(q, g), 1e-9)) {
      ++ranking_changes;
    }
  }
  return Judge(worst <= 1e-7 && ranking_changes == 0,
               Fmt("max relative gap %.3g (limit 1e-7), instances with changed "
                   "rankings %zu/100",
                   worst, ranking_changes));
}

Outcome CompetitorsChangeDistances() {
  const Matrix w = testing::MatrixWithSpectrum(16, {5.0, 3.5, 2.0, 1.2, 0.6, 0.3}, 404);
  const Matrix h = RandomMatrix(20, 16, 405);
  std::string detail;
  bool ok = true;
  for (DecorrMethod m : {DecorrMethod::kU, DecorrMethod::kUVt, DecorrMethod::kQD}) {
    const double gap = RelativeGap(w, ApplyDecorrelation(w, m), h);
    ok = ok && gap > 1e-3;
    detail += Fmt("%s %.3g; ", std::string(ToString(m)).c_str(), gap);
  }
  detail += Fmt("US %.3g (each competitor must exceed 1e-3)",
                RelativeGap(w, ApplyDecorrelation(w, DecorrMethod::kUS), h));
  return Judge(ok, detail);
}

Outcome CorrelationScoreValues() {
  const Matrix hadamard{{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
  const double orth = CorrelationOf(hadamard).value;
  const double ident = CorrelationOf(Matrix::Identity(6)).value;

  const std::size_t k = 5;
  Matrix same(8, k);
  for (std::size_t j = 0; j < k; ++j) {
    same(1, j) = 0.6;
    same(6, j) = -0.8;
  }
  const double same_err = std::fabs(CorrelationOf(same).value - 1.0 / k);

  double oracle_err = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix w = RandomMatrix(8, 2 + seed % 6, 30'000 + seed);
    oracle_err = std::max(oracle_err, std::fabs(CorrelationOf(w).value -
                                                testing::NaiveCorrelation(w)));
  }
  return Judge(orth == 1.0 && ident == 1.0 && same_err <= 1e-12 && oracle_err <= 1e-12,
               Fmt("orthogonal %.17g, identical columns |S-1/k| %.3g, oracle "
                   "max diff %.3g",
                   orth, same_err, oracle_err));
}

Outcome GradientChecks() {
  const EigenModel m = InitModel({6, {10, 8}, 5, 4}, 77);
  const Matrix x = RandomMatrix(10, 6, 78);
  std::vector<std::size_t> y(10);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (3 * i + 1) % 4;
  const auto free = testing::CheckGradients(m, x, y, {false});
  const auto frozen = testing::CheckGradients(m, x, y, {true});
  const bool ok = m.ParameterCount() <= 1000 && free.max_relative_error <= 1e-6 &&
                  frozen.max_relative_error <= 1e-6 && frozen.frozen_grad_is_zero;
  return Judge(ok, Fmt("%zu parameters, max relative error unfrozen %.3g, frozen "
                       "%.3g, frozen W gradient zero: %s",
                       m.ParameterCount(), free.max_relative_error,
                       frozen.max_relative_error,
                       frozen.frozen_grad_is_zero ? "yes" : "no"));
}

TrainData DefaultData() { return TrainData::From(GenerateSynthetic(SyntheticConfig{})); }

Outcome RriEndToEnd() {
  const TrainData data = DefaultData();
  const TrainConfig config;
  const TrainResult run = TrainSvdNet(data, config, {});
  const RriTrace &trace = run.trace;
  const TrainResult base = TrainBaseline(data, config, trace.iterations);

  double min_decorr = 1.0;
  for (const TraceRecord &r : trace.records) {
    if (r.phase == Phase::kDecorrelate) min_decorr = std::min(min_decorr, r.s_of_w);
  }
  const auto history = trace.RelaxationHistory();
  double worst_step = 0.0;
  std::string seq;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i > 0) worst_step = std::min(worst_step, history[i].value - history[i - 1].value);
    seq += Fmt("%s%.4f", i ? " " : "", history[i].value);
  }
  const TraceRecord &last = trace.records.back();
  const TraceRecord &ref = base.trace.records.back();

  const bool a = min_decorr >= 1.0 - 1e-6;
  const bool b = worst_step >= -0.02 && trace.converged;
  const bool c = last.s_of_w >= ref.s_of_w + 0.3;
  const bool d = last.map >= ref.map + 0.03;
  return Judge(a && b && c && d,
               Fmt("(a) min post-decorrelation S %.9f %s; (b) worst step %+.4f, "
                   "converged %s after %zu [%s] %s; (c) S %.4f vs baseline %.4f %s; "
                   "(d) mAP %.4f vs baseline %.4f %s",
                   min_decorr, a ? "ok" : "FAIL", worst_step,
                   trace.converged ? "yes" : "no", trace.iterations, seq.c_str(),
                   b ? "ok" : "FAIL", last.s_of_w, ref.s_of_w, c ? "ok" : "FAIL",
                   last.map, ref.map, d ? "ok" : "FAIL"));
}

Outcome MethodComparison() {
  const TrainData data = DefaultData();
  const TrainConfig config;
  const std::set<DecorrMethod> all(AllDecorrMethods().begin(), AllDecorrMethods().end());
  const auto rows = RunDecorrComparison(data, config, all);
  std::map<DecorrMethod, double> map;
  std::string detail;
  for (const ComparisonRow &r : rows) {
    map[r.method] = r.map;
    detail += Fmt("%s %.4f; ", std::string(ToString(r.method)).c_str(), r.map);
  }
  bool ok = true;
  for (DecorrMethod m : {DecorrMethod::kOrig, DecorrMethod::kUVt, DecorrMethod::kQD}) {
    ok = ok && map[DecorrMethod::kUS] >= map[m] - 0.005;
  }
  return Judge(ok, "mAP " + detail + "US must be >= Orig, UVt, QD (tie slack 0.005)");
}

Outcome DimensionSweep() {
  const TrainData data = DefaultData();
  const std::vector<std::size_t> dims = {4, 8, 16, 32, 64, 128};
  std::vector<double> with, without;
  std::string curve;
  for (std::size_t d : dims) {
    TrainConfig config;
    config.eigen_dim = d;
    const RriTrace rri = TrainSvdNet(data, config, {}).trace;
    const RriTrace base = TrainBaseline(data, config, rri.iterations).trace;
    with.push_back(rri.records.back().map);
    without.push_back(base.records.back().map);
    curve += Fmt("%zu:%.3f/%.3f ", d, without.back(), with.back());
  }
  const std::size_t last = dims.size() - 1;
  const double with_peak = *std::max_element(with.begin(), with.end());
  const bool with_ok = with[last] >= with_peak - 0.02 && with[last - 1] >= with_peak - 0.02;
  const double without_peak = *std::max_element(without.begin(), without.end());
  const double drop = without_peak - without[last];
  const std::string detail =
      Fmt("mAP without/with by dim: %s| with-RRI peak %.4f, top-two %.4f %.4f; "
          "without-RRI peak %.4f, drop at largest dim %.4f",
          curve.c_str(), with_peak, with[last - 1], with[last], without_peak, drop);
  if (!with_ok) return {Verdict::kFail, detail};
  if (drop >= 0.02) return {Verdict::kPass, detail};
  return {Verdict::kInconclusive, detail + " (no without-RRI peak beyond 0.02)"};
}

std::string ReadBytes(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome Determinism() {
  const TrainData data = DefaultData();
  const fs::path root = fs::temp_directory_path() / "svdnet_acceptance_determinism";
  fs::remove_all(root);
  std::string traces[2];
  for (int run = 0; run < 2; ++run) {
    TrainOptions options;
    options.checkpoint_dir = root / std::to_string(run);
    fs::create_directories(options.checkpoint_dir);
    traces[run] = TraceToCsv(TrainSvdNet(data, TrainConfig{}, options).trace);
  }
  std::size_t files = 0;
  std::size_t mismatched = 0;
  for (const auto &entry : fs::directory_iterator(root / "0")) {
    ++files;
    const fs::path other = root / "1" / entry.path().filename();
    if (!fs::exists(other) || ReadBytes(entry.path()) != ReadBytes(other)) ++mismatched;
  }
  std::size_t files_other = 0;
  for ([[maybe_unused]] const auto &entry : fs::directory_iterator(root / "1")) {
    ++files_other;
  }
  fs::remove_all(root);
  const bool ok = traces[0] == traces[1] && files > 0 && files == files_other &&
                  mismatched == 0;
  return Judge(ok, Fmt("trace identical: %s, %zu checkpoints compared, %zu differ",
                       traces[0] == traces[1] ? "yes" : "no", files, mismatched));
}

Outcome EvaluationOracle() {
  double worst = 0.0;
  std::size_t shape_mismatch = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto in = testing::RandomRetrievalInstance(50'000 + seed);
    const RankingReport r = Evaluate(in.query, in.gallery, in.ranked);
    const auto o = testing::BruteForceEvaluate(in.query, in.gallery, in.ranked);
    if (r.per_query_ap.size() != o.ap.size() || r.cmc.size() != o.cmc.size()) {
      ++shape_mismatch;
      continue;
    }
    worst = std::max(worst, std::fabs(r.map - o.map));
    for (std::size_t i = 0; i < o.ap.size(); ++i) {
      worst = std::max(worst, std::fabs(r.per_query_ap[i] - o.ap[i]));
    }
    for (std::size_t i = 0; i < o.cmc.size(); ++i) {
      worst = std::max(worst, std::fabs(r.cmc[i] - o.cmc[i]));
    }
  }
  return Judge(worst <= 1e-12 && shape_mismatch == 0,
               Fmt("max |diff| over AP, mAP, CMC %.3g on 50 instances", worst));
}

}  // namespace
}  // namespace svdnet

int main(int argc, char **argv) {
  using namespace svdnet;
  spdlog::set_level(spdlog::level::warn);
  const std::vector<Criterion> criteria = {
      {1, "distance preservation under W <- US", 5, DistancePreservation},
      {2, "U, UV^T, QD change distances", 5, CompetitorsChangeDistances},
      {3, "S(W) values", 1, CorrelationScoreValues},
      {4, "gradient checks", 30, GradientChecks},
      {5, "RRI end-to-end", 600, RriEndToEnd},
      {6, "decorrelation method comparison", 1800, MethodComparison},
      {7, "Eigenlayer dimension sweep", 1800, DimensionSweep},
      {8, "determinism", 600, Determinism},
      {9, "evaluation oracle", 10, EvaluationOracle},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion &c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception &e) {
      outcome = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_seconds && outcome.verdict != Verdict::kFail) {
      outcome.verdict = Verdict::kFail;
      outcome.detail += Fmt("; runtime over the %.0f s limit", c.limit_seconds);
    }
    const char *tag = outcome.verdict == Verdict::kPass   ? "PASS"
                      : outcome.verdict == Verdict::kFail ? "FAIL"
                                                          : "INCONCLUSIVE";
    std::printf("%-12s %d %s [%.2f s]: %s\n", tag, c.id, c.name.c_str(), secs,
                outcome.detail.c_str());
    std::fflush(stdout);
    if (outcome.verdict == Verdict::kFail) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
