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

#include "svdnet/checkpoint.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "svdnet/error.h"

namespace svdnet {

namespace {

constexpr char kMagic[4] = {'S', 'V', 'D', 'N'};

template <typename T>
void PutLittle(std::string &out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(buf), std::end(buf));
  }
  out.append(reinterpret_cast<const char *>(buf), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string &bytes) : bytes_(bytes) {}

  template <typename T>
  T Get(const char *what) {
    if (pos_ + sizeof(T) > bytes_.size()) {
      throw ValidationError(std::string("checkpoint truncated while reading ") +
                            what);
    }
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(std::begin(buf), std::end(buf));
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  const std::string &bytes_;
  std::size_t pos_ = 0;
};

void PutLayer(std::string &out, LayerRole role, const Matrix &w,
              const std::vector<double> *bias) {
  PutLittle<std::uint8_t>(out, static_cast<std::uint8_t>(role));
  PutLittle<std::uint32_t>(out, static_cast<std::uint32_t>(w.rows()));
  PutLittle<std::uint32_t>(out, static_cast<std::uint32_t>(w.cols()));
  for (double v : w.data()) PutLittle<double>(out, v);
  PutLittle<std::uint8_t>(out, bias ? 1 : 0);
  if (bias) {
    for (double v : *bias) PutLittle<double>(out, v);
  }
}

struct RawLayer {
  LayerRole role;
  Matrix weight;
  std::optional<std::vector<double>> bias;
};

RawLayer GetLayer(Reader &in, std::uint32_t index) {
  const auto role = in.Get<std::uint8_t>("layer role");
  if (role > 2) {
    throw ValidationError("checkpoint layer " + std::to_string(index) +
                          ": unknown role tag " + std::to_string(role));
  }
  const auto rows = in.Get<std::uint32_t>("rows");
  const auto cols = in.Get<std::uint32_t>("cols");
  if (rows == 0 || cols == 0) {
    throw ValidationError("checkpoint layer " + std::to_string(index) +
                          ": zero dimension");
  }
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  for (double &v : data) v = in.Get<double>("weights");
  const auto has_bias = in.Get<std::uint8_t>("bias flag");
  if (has_bias > 1) throw ValidationError("checkpoint: invalid bias flag");
  RawLayer layer{static_cast<LayerRole>(role),
                 Matrix(rows, cols, std::move(data)), std::nullopt};
  if (has_bias) {
    std::vector<double> bias(cols);
    for (double &v : bias) v = in.Get<double>("bias");
    layer.bias = std::move(bias);
  }
  return layer;
}

}  // namespace

std::string EncodeCheckpoint(const EigenModel &model) {
  model.Validate();
  std::string out(kMagic, sizeof(kMagic));
  PutLittle<std::uint16_t>(out, kCheckpointVersion);
  PutLittle<std::uint32_t>(out,
                           static_cast<std::uint32_t>(model.backbone.size() + 2));
  for (const AffineLayer &l : model.backbone) {
    PutLayer(out, LayerRole::kBackbone, l.weight, &l.bias);
  }
  PutLayer(out, LayerRole::kEigenlayer, model.eigenlayer, nullptr);
  PutLayer(out, LayerRole::kClassifier, model.classifier.weight,
           &model.classifier.bias);
  return out;
}

EigenModel DecodeCheckpoint(const std::string &bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError("checkpoint: bad magic (expected SVDN)");
  }
  Reader in(bytes);
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) in.Get<char>("magic");
  const auto version = in.Get<std::uint16_t>("version");
  if (version != kCheckpointVersion) {
    throw ValidationError("checkpoint: unsupported version " +
                          std::to_string(version));
  }
  const auto count = in.Get<std::uint32_t>("layer count");
  if (count < 3) throw ValidationError("checkpoint: needs at least 3 layers");

  std::vector<AffineLayer> backbone;
  std::optional<Matrix> eigen;
  std::optional<AffineLayer> classifier;
  for (std::uint32_t i = 0; i < count; ++i) {
    RawLayer layer = GetLayer(in, i);
    const bool is_last = i + 1 == count;
    const bool is_eigen = i + 2 == count;
    switch (layer.role) {
      case LayerRole::kBackbone:
        if (is_eigen || is_last || !layer.bias) {
          throw ValidationError("checkpoint: misplaced backbone layer " +
                                std::to_string(i));
        }
        backbone.push_back({std::move(layer.weight), std::move(*layer.bias)});
        break;
      case LayerRole::kEigenlayer:
        if (!is_eigen || layer.bias) {
          throw ValidationError(
              "checkpoint: eigenlayer must be second to last and bias-free");
        }
        eigen = std::move(layer.weight);
        break;
      case LayerRole::kClassifier:
        if (!is_last || !layer.bias) {
          throw ValidationError("checkpoint: classifier must be last with bias");
        }
        classifier = AffineLayer{std::move(layer.weight), std::move(*layer.bias)};
        break;
    }
  }
  if (!in.AtEnd()) throw ValidationError("checkpoint: trailing bytes");
  EigenModel model{std::move(backbone), std::move(*eigen),
                   std::move(*classifier)};
  model.Validate();
  return model;
}

void SaveCheckpoint(const EigenModel &model, const std::filesystem::path &path) {
  const std::string bytes = EncodeCheckpoint(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

EigenModel LoadCheckpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return DecodeCheckpoint(buf.str());
}

}  // namespace svdnet
