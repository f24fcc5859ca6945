// Copyright 2026 The dualvoice Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dualvoice/classifier_model.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>

#include "dualvoice/error.h"
#include "dualvoice/mfcc.h"

namespace dualvoice {
namespace {

constexpr char kMagic[4] = {'D', 'V', 'M', 'D'};
constexpr std::size_t kHeaderSize = 4 + 1 + 1 + 3 * 4;

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

std::uint32_t GetU32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

void FillUniform(std::span<double> out, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : out) v = dist(rng);
}

}  // namespace

const char* FrontendName(Frontend f) {
  return f == Frontend::kMfcc ? "mfcc" : "conv";
}

ClassifierModel ClassifierModel::Create(Frontend frontend,
                                        std::size_t feature_dim,
                                        std::size_t hidden, int conv_channels,
                                        std::uint64_t seed) {
  if (feature_dim == 0 || hidden == 0) {
    throw Error(ErrorCode::kInvalidArgument, "model dims must be positive");
  }
  if (frontend == Frontend::kConv &&
      (conv_channels <= 0 ||
       static_cast<std::size_t>(conv_channels) != feature_dim)) {
    throw Error(ErrorCode::kInvalidArgument,
                "conv frontend needs feature_dim == conv channels");
  }
  ClassifierModel m;
  m.frontend_ = frontend;
  m.feature_dim_ = feature_dim;
  m.hidden_ = hidden;
  m.conv_channels_ = frontend == Frontend::kConv ? conv_channels : 0;
  m.conv_spec_ = ConvStackSpec::WithChannels(
      m.conv_channels_ > 0 ? m.conv_channels_ : kDeskConvChannels);
  std::size_t conv_count =
      frontend == Frontend::kConv ? m.conv_spec_.weight_count() : 0;
  m.params_.assign(m.conv_offset() + conv_count, 0.0);

  std::mt19937_64 rng(seed);
  std::span<double> p = m.params_;
  for (std::size_t i = 0; i < feature_dim; ++i) p[m.ln_gamma_offset() + i] = 1.0;
  FillUniform(p.subspan(m.fc1_w_offset(), hidden * feature_dim),
              std::sqrt(6.0 / (feature_dim + hidden)), rng);
  FillUniform(p.subspan(m.fc2_w_offset(), kClassCount * hidden),
              std::sqrt(6.0 / (hidden + kClassCount)), rng);
  if (frontend == Frontend::kConv) {
    std::size_t offset = m.conv_offset();
    for (std::size_t b = 0; b < kConvBlockCount; ++b) {
      const std::size_t count = m.conv_spec_.block_weight_count(b);
      const double fan_in = static_cast<double>(m.conv_spec_.input_channels(b)) *
                            m.conv_spec_.blocks[b].kernel;
      FillUniform(p.subspan(offset, count), std::sqrt(6.0 / fan_in), rng);
      offset += count;
    }
  }
  m.RoundToFloat();
  return m;
}

std::vector<ClassifierModel::Tensor> ClassifierModel::Tensors() const {
  std::vector<Tensor> t = {
      {"ln.gamma", ln_gamma_offset(), feature_dim_},
      {"ln.beta", ln_beta_offset(), feature_dim_},
      {"fc1.w", fc1_w_offset(), hidden_ * feature_dim_},
      {"fc1.b", fc1_b_offset(), hidden_},
      {"fc2.w", fc2_w_offset(), kClassCount * hidden_},
      {"fc2.b", fc2_b_offset(), kClassCount},
  };
  if (frontend_ == Frontend::kConv) {
    std::size_t offset = conv_offset();
    for (std::size_t b = 0; b < kConvBlockCount; ++b) {
      t.push_back({"conv" + std::to_string(b) + ".w", offset,
                   conv_spec_.block_weight_count(b)});
      offset += conv_spec_.block_weight_count(b);
    }
  }
  return t;
}

void ClassifierModel::RoundToFloat() {
  for (double& v : params_) v = static_cast<float>(v);
}

std::vector<std::uint8_t> SerializeModel(const ClassifierModel& model) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kModelVersion);
  out.push_back(static_cast<std::uint8_t>(model.frontend()));
  PutU32(out, static_cast<std::uint32_t>(model.feature_dim()));
  PutU32(out, static_cast<std::uint32_t>(model.hidden()));
  PutU32(out, static_cast<std::uint32_t>(model.conv_channels()));
  out.reserve(out.size() + 4 * model.param_count());
  for (double v : model.params()) {
    PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

ClassifierModel DeserializeModel(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::kFormat, "model: truncated header");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kFormat, "model: bad magic");
  }
  if (bytes[4] != kModelVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "model: unsupported version " + std::to_string(bytes[4]));
  }
  if (bytes[5] > 1) {
    throw Error(ErrorCode::kFormat,
                "model: bad frontend id " + std::to_string(bytes[5]));
  }
  const auto frontend = static_cast<Frontend>(bytes[5]);
  const std::uint32_t dim = GetU32(bytes.data() + 6);
  const std::uint32_t hidden = GetU32(bytes.data() + 10);
  const std::uint32_t channels = GetU32(bytes.data() + 14);

  if (frontend == Frontend::kMfcc) {
    if (dim != kMfccCoefficients) {
      throw Error(ErrorCode::kFormat, "model: feature_dim " +
                                          std::to_string(dim) +
                                          " does not match mfcc (13)");
    }
    if (channels != 0) {
      throw Error(ErrorCode::kFormat,
                  "model: conv_channels must be 0 for mfcc frontend");
    }
  } else if (channels == 0 || channels != dim || channels > 4096) {
    throw Error(ErrorCode::kFormat, "model: conv_channels " +
                                        std::to_string(channels) +
                                        " does not match feature_dim " +
                                        std::to_string(dim));
  }
  if (hidden == 0 || hidden > (1u << 16)) {
    throw Error(ErrorCode::kFormat,
                "model: hidden " + std::to_string(hidden) + " out of range");
  }

  ClassifierModel model = ClassifierModel::Create(
      frontend, dim, hidden, static_cast<int>(channels), 0);
  const std::size_t expected = kHeaderSize + 4 * model.param_count();
  if (bytes.size() < expected) {
    throw Error(ErrorCode::kFormat, "model: parameters truncated (" +
                                        std::to_string(bytes.size()) + " of " +
                                        std::to_string(expected) + " bytes)");
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::kFormat, "model: trailing bytes after parameters");
  }
  auto params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] = std::bit_cast<float>(GetU32(bytes.data() + kHeaderSize + 4 * i));
  }
  return model;
}

void SaveModel(const ClassifierModel& model, const std::string& path) {
  auto bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path);
}

ClassifierModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DeserializeModel(bytes);
}

}  // namespace dualvoice
