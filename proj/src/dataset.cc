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

#include "svdnet/dataset.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "svdnet/error.h"
#include "svdnet/random.h"
#include "svdnet/text.h"

namespace svdnet {

namespace {

template <typename T>
T ParseNumber(std::string_view field, std::size_t line, const char *what) {
  T value{};
  const char *first = field.data();
  const char *last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError("dataset csv line " + std::to_string(line) +
                          ": bad " + what + " '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string_view ToString(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kQuery:
      return "query";
    case Split::kGallery:
      return "gallery";
  }
  return "?";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "query") return Split::kQuery;
  if (name == "gallery") return Split::kGallery;
  throw ValidationError("unknown split '" + std::string(name) + "'");
}

void RetrievalDataset::Validate() const {
  const std::size_t n = features.rows();
  if (labels.ids.size() != n || labels.cameras.size() != n ||
      splits.size() != n) {
    throw ValidationError("dataset: label/split counts do not match row count");
  }
  // identity -> cameras present in the gallery
  std::map<int, std::set<int>> gallery_cams;
  for (std::size_t i = 0; i < n; ++i) {
    if (splits[i] == Split::kGallery) {
      gallery_cams[labels.ids[i]].insert(labels.cameras[i]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (splits[i] != Split::kQuery) continue;
    const auto it = gallery_cams.find(labels.ids[i]);
    const bool ok = it != gallery_cams.end() &&
                    (it->second.size() > 1 ||
                     !it->second.contains(labels.cameras[i]));
    if (!ok) {
      throw ValidationError("dataset: query row " + std::to_string(i) +
                            " (id " + std::to_string(labels.ids[i]) +
                            ") has no gallery match from another camera");
    }
  }
}

std::vector<std::size_t> RetrievalDataset::RowsOf(Split split) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split) rows.push_back(i);
  }
  return rows;
}

Matrix RetrievalDataset::FeaturesOf(Split split) const {
  const auto rows = RowsOf(split);
  if (rows.empty()) {
    throw ValidationError("dataset: split '" + std::string(ToString(split)) +
                          "' is empty");
  }
  return features.GatherRows(rows);
}

Labels RetrievalDataset::LabelsOf(Split split) const {
  Labels out;
  for (std::size_t i : RowsOf(split)) {
    out.ids.push_back(labels.ids[i]);
    out.cameras.push_back(labels.cameras[i]);
  }
  return out;
}

RetrievalDataset GenerateSynthetic(const SyntheticConfig &config) {
  if (config.identities < 2) {
    throw ValidationError("synthetic: need at least 2 identities");
  }
  if (config.cameras < 2) {
    throw ValidationError("synthetic: need at least 2 cameras");
  }
  if (config.samples_per_camera < 1 || config.dim < 1) {
    throw ValidationError("synthetic: samples and dim must be positive");
  }
  if (!(config.noise >= 0.0) || !(config.camera_offset >= 0.0)) {
    throw ValidationError("synthetic: noise and camera offset must be >= 0");
  }

  const std::size_t d = config.dim;
  const std::size_t latent = config.latent_dim == 0 ? d : config.latent_dim;
  if (latent > d) {
    throw ValidationError("synthetic: latent_dim exceeds dim");
  }
  Rng rng(config.seed);

  // Unit-variance coordinates: embedding entries ~ N(0, 1/latent).
  Matrix embed(d, latent);
  const double embed_scale = 1.0 / std::sqrt(static_cast<double>(latent));
  for (double &v : embed.data()) v = embed_scale * rng.Normal();
  std::vector<std::vector<double>> centers(config.identities,
                                           std::vector<double>(d, 0.0));
  std::vector<double> z(latent);
  for (auto &c : centers) {
    for (double &v : z) v = rng.Normal();
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < latent; ++j) c[i] += embed(i, j) * z[j];
    }
  }

  struct Camera {
    Matrix transform;
    std::vector<double> shift;
  };
  std::vector<Camera> cams;
  const double mix_scale = config.camera_offset / std::sqrt(static_cast<double>(d));
  for (std::size_t c = 0; c < config.cameras; ++c) {
    Camera cam{Matrix::Identity(d), std::vector<double>(d)};
    for (double &v : cam.transform.data()) v += mix_scale * rng.Normal();
    for (double &v : cam.shift) v = config.camera_offset * rng.Normal();
    cams.push_back(std::move(cam));
  }

  const std::size_t train_ids = config.identities / 2;
  const std::size_t rows =
      config.identities * config.cameras * config.samples_per_camera;
  RetrievalDataset data{Matrix(rows, d), {}, {}};
  std::size_t r = 0;
  for (std::size_t id = 0; id < config.identities; ++id) {
    for (std::size_t c = 0; c < config.cameras; ++c) {
      for (std::size_t s = 0; s < config.samples_per_camera; ++s, ++r) {
        auto row = data.features.row(r);
        const Camera &cam = cams[c];
        for (std::size_t i = 0; i < d; ++i) {
          double acc = cam.shift[i];
          for (std::size_t j = 0; j < d; ++j) {
            acc += cam.transform(i, j) * centers[id][j];
          }
          row[i] = acc + config.noise * rng.Normal();
        }
        data.labels.ids.push_back(static_cast<int>(id));
        data.labels.cameras.push_back(static_cast<int>(c));
        Split split = Split::kTrain;
        if (id >= train_ids) {
          const bool is_query = s == 0 && (config.samples_per_camera > 1 || c == 0);
          split = is_query ? Split::kQuery : Split::kGallery;
        }
        data.splits.push_back(split);
      }
    }
  }
  data.Validate();
  return data;
}

std::string DatasetToCsv(const RetrievalDataset &data) {
  std::ostringstream out;
  out << "id,camera,split";
  for (std::size_t j = 0; j < data.dim(); ++j) out << ",f" << j;
  out << '\n';
  for (std::size_t i = 0; i < data.features.rows(); ++i) {
    out << data.labels.ids[i] << ',' << data.labels.cameras[i] << ','
        << ToString(data.splits[i]);
    for (double v : data.features.row(i)) out << ',' << FormatReal(v);
    out << '\n';
  }
  return out.str();
}

void WriteDatasetCsv(const RetrievalDataset &data,
                     const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << DatasetToCsv(data);
  if (!out) throw Error("failed writing " + path.string());
}

RetrievalDataset DatasetFromCsv(std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view &line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw ValidationError("dataset csv: empty input");
  const auto header = SplitFields(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "camera" ||
      header[2] != "split") {
    throw ValidationError("dataset csv: header must be id,camera,split,f0,...");
  }
  const std::size_t d = header.size() - 3;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[3 + j] != "f" + std::to_string(j)) {
      throw ValidationError("dataset csv: expected column f" +
                            std::to_string(j));
    }
  }

  std::vector<double> values;
  Labels labels;
  std::vector<Split> splits;
  while (next_line(line)) {
    if (line.empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != d + 3) {
      throw ValidationError("dataset csv line " + std::to_string(line_no) +
                            ": expected " + std::to_string(d + 3) + " fields");
    }
    labels.ids.push_back(ParseNumber<int>(fields[0], line_no, "id"));
    labels.cameras.push_back(ParseNumber<int>(fields[1], line_no, "camera"));
    splits.push_back(ParseSplit(fields[2]));
    for (std::size_t j = 0; j < d; ++j) {
      const double v = ParseNumber<double>(fields[3 + j], line_no, "feature");
      if (!std::isfinite(v)) {
        throw ValidationError("dataset csv line " + std::to_string(line_no) +
                              ": non-finite feature");
      }
      values.push_back(v);
    }
  }
  if (splits.empty()) throw ValidationError("dataset csv: no rows");
  const std::size_t n = splits.size();
  RetrievalDataset data{Matrix(n, d, std::move(values)), std::move(labels),
                        std::move(splits)};
  data.Validate();
  return data;
}

RetrievalDataset ReadDatasetCsv(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return DatasetFromCsv(buf.str());
}

ClassificationSet TrainingSet(const RetrievalDataset &data) {
  const auto rows = data.RowsOf(Split::kTrain);
  if (rows.empty()) throw ValidationError("dataset: training split is empty");
  std::map<int, std::size_t> class_of;
  for (std::size_t i : rows) class_of.emplace(data.labels.ids[i], 0);
  std::size_t next = 0;
  for (auto &[id, cls] : class_of) cls = next++;

  ClassificationSet out{data.features.GatherRows(rows), {}, class_of.size()};
  out.y.reserve(rows.size());
  for (std::size_t i : rows) out.y.push_back(class_of[data.labels.ids[i]]);
  return out;
}

}  // namespace svdnet
