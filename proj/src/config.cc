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

#include "svdnet/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "svdnet/error.h"
#include "svdnet/text.h"

namespace svdnet {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value,
                           const char *expected) {
  throw ValidationError("config key '" + std::string(key) + "': cannot parse '" +
                        std::string(value) + "' as " + expected);
}

template <typename T>
T ParseInt(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    BadValue(key, value, "a non-negative integer");
  }
  return out;
}

double ParseReal(std::string_view key, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    BadValue(key, value, "a finite real");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  BadValue(key, value, "a boolean");
}

std::vector<std::size_t> ParseDims(std::string_view key, std::string_view value) {
  std::vector<std::size_t> dims;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto part = Trim(value.substr(start, comma - start));
    dims.push_back(ParseInt<std::size_t>(key, part));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return dims;
}

}  // namespace

void RriSchedule::Validate() const {
  auto require_count = [](std::size_t v, const char *name) {
    if (v < 1) {
      throw ValidationError(std::string("schedule: ") + name + " must be >= 1");
    }
  };
  auto require_positive = [](double v, const char *name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string("schedule: ") + name + " must be > 0");
    }
  };
  require_count(step0_epochs, "step0_epochs");
  require_count(restraint_epochs, "restraint_epochs");
  require_count(relaxation_epochs, "relaxation_epochs");
  require_count(max_rri, "max_rri");
  require_count(batch_size, "batch_size");
  require_positive(lr_step0, "lr_step0");
  require_positive(lr_restraint, "lr_restraint");
  require_positive(lr_relaxation, "lr_relaxation");
  require_positive(epsilon_s, "epsilon_s");
}

void TrainConfig::Validate() const {
  schedule.Validate();
  if (hidden_dims.empty()) throw ValidationError("config: hidden_dims is empty");
  for (std::size_t d : hidden_dims) {
    if (d == 0) throw ValidationError("config: hidden_dims entries must be > 0");
  }
  if (eigen_dim == 0) throw ValidationError("config: eigen_dim must be > 0");
  if (eigen_dim > hidden_dims.back()) {
    throw ValidationError("config: eigen_dim " + std::to_string(eigen_dim) +
                          " exceeds the last hidden width " +
                          std::to_string(hidden_dims.back()));
  }
}

const std::vector<std::string> &ConfigKeys() {
  static const std::vector<std::string> kKeys = {
      "step0_epochs", "restraint_epochs", "relaxation_epochs", "max_rri",
      "lr_step0",     "lr_restraint",     "lr_relaxation",     "batch_size",
      "epsilon_s",    "seed",             "hidden_dims",       "eigen_dim",
      "dataset",      "eval_feature",     "l2_normalize",      "decorr_method"};
  return kKeys;
}

void SetConfigValue(TrainConfig &config, std::string_view key,
                    std::string_view raw) {
  const std::string_view value = Trim(raw);
  RriSchedule &s = config.schedule;
  if (key == "step0_epochs") {
    s.step0_epochs = ParseInt<std::size_t>(key, value);
  } else if (key == "restraint_epochs") {
    s.restraint_epochs = ParseInt<std::size_t>(key, value);
  } else if (key == "relaxation_epochs") {
    s.relaxation_epochs = ParseInt<std::size_t>(key, value);
  } else if (key == "max_rri") {
    s.max_rri = ParseInt<std::size_t>(key, value);
  } else if (key == "lr_step0") {
    s.lr_step0 = ParseReal(key, value);
  } else if (key == "lr_restraint") {
    s.lr_restraint = ParseReal(key, value);
  } else if (key == "lr_relaxation") {
    s.lr_relaxation = ParseReal(key, value);
  } else if (key == "batch_size") {
    s.batch_size = ParseInt<std::size_t>(key, value);
  } else if (key == "epsilon_s") {
    s.epsilon_s = ParseReal(key, value);
  } else if (key == "seed") {
    s.seed = ParseInt<std::uint64_t>(key, value);
  } else if (key == "hidden_dims") {
    config.hidden_dims = ParseDims(key, value);
  } else if (key == "eigen_dim") {
    config.eigen_dim = ParseInt<std::size_t>(key, value);
  } else if (key == "dataset") {
    config.dataset = std::string(value);
  } else if (key == "eval_feature") {
    if (value == "input") {
      config.eval_feature = FeatureKind::kInput;
    } else if (value == "output") {
      config.eval_feature = FeatureKind::kOutput;
    } else {
      BadValue(key, value, "'input' or 'output'");
    }
  } else if (key == "l2_normalize") {
    config.l2_normalize = ParseBool(key, value);
  } else if (key == "decorr_method") {
    try {
      config.decorr_method = ParseDecorrMethod(value);
    } catch (const ValidationError &) {
      BadValue(key, value, "one of Orig, US, U, UVt, QD");
    }
  } else {
    throw ValidationError("unknown config key '" + std::string(key) + "'");
  }
}

TrainConfig ParseConfig(std::string_view text) {
  TrainConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = Trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected 'key = value'");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    if (!seen.emplace(key).second) {
      throw ValidationError("config key '" + std::string(key) +
                            "' appears more than once");
    }
    SetConfigValue(config, key, line.substr(eq + 1));
  }
  config.Validate();
  return config;
}

TrainConfig LoadConfig(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

std::string FormatConfig(const TrainConfig &config) {
  const RriSchedule &s = config.schedule;
  std::ostringstream out;
  out << "step0_epochs = " << s.step0_epochs << '\n'
      << "restraint_epochs = " << s.restraint_epochs << '\n'
      << "relaxation_epochs = " << s.relaxation_epochs << '\n'
      << "max_rri = " << s.max_rri << '\n'
      << "lr_step0 = " << FormatReal(s.lr_step0) << '\n'
      << "lr_restraint = " << FormatReal(s.lr_restraint) << '\n'
      << "lr_relaxation = " << FormatReal(s.lr_relaxation) << '\n'
      << "batch_size = " << s.batch_size << '\n'
      << "epsilon_s = " << FormatReal(s.epsilon_s) << '\n'
      << "seed = " << s.seed << '\n'
      << "hidden_dims = ";
  for (std::size_t i = 0; i < config.hidden_dims.size(); ++i) {
    out << (i ? "," : "") << config.hidden_dims[i];
  }
  out << '\n'
      << "eigen_dim = " << config.eigen_dim << '\n'
      << "dataset = " << config.dataset << '\n'
      << "eval_feature = "
      << (config.eval_feature == FeatureKind::kInput ? "input" : "output") << '\n'
      << "l2_normalize = " << (config.l2_normalize ? "true" : "false") << '\n'
      << "decorr_method = " << ToString(config.decorr_method) << '\n';
  return out.str();
}

}  // namespace svdnet
