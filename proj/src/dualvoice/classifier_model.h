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

#ifndef DUALVOICE_CLASSIFIER_MODEL_H_
#define DUALVOICE_CLASSIFIER_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dualvoice/conv_stack.h"

namespace dualvoice {

enum class Frontend : std::uint8_t { kMfcc = 0, kConv = 1 };

const char* FrontendName(Frontend f);

inline constexpr std::size_t kMfccHidden = 64;
inline constexpr std::size_t kConvHidden = 512;
inline constexpr std::size_t kClassCount = 2;  // normal, whisper

// LayerNorm -> mean pool -> FC -> ReLU -> FC(2), optionally preceded by the
// strided conv stack. All parameters live in one flat vector in file order:
//   layernorm gamma[D], beta[D]
//   fc1 W[H][D] (row-major, output-major), b[H]
//   fc2 W[2][H], b[2]
//   conv blocks 0..6, each W[out][in][kernel]
class ClassifierModel {
 public:
  ClassifierModel() = default;

  // Random init: LayerNorm identity, Glorot-uniform FCs, He-uniform conv.
  // Values are rounded to float so a fresh model survives save/load exactly.
  static ClassifierModel Create(Frontend frontend, std::size_t feature_dim,
                                std::size_t hidden, int conv_channels,
                                std::uint64_t seed);
  static ClassifierModel CreateMfcc(std::uint64_t seed) {
    return Create(Frontend::kMfcc, 13, kMfccHidden, 0, seed);
  }
  static ClassifierModel CreateConv(std::uint64_t seed,
                                    int channels = kDeskConvChannels,
                                    std::size_t hidden = kConvHidden) {
    return Create(Frontend::kConv, channels, hidden, channels, seed);
  }

  Frontend frontend() const { return frontend_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t hidden() const { return hidden_; }
  int conv_channels() const { return conv_channels_; }
  const ConvStackSpec& conv_spec() const { return conv_spec_; }
  ConvStackSpec& mutable_conv_spec() { return conv_spec_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }
  // Everything except the conv stack.
  std::size_t head_param_count() const { return conv_offset(); }

  std::size_t ln_gamma_offset() const { return 0; }
  std::size_t ln_beta_offset() const { return feature_dim_; }
  std::size_t fc1_w_offset() const { return 2 * feature_dim_; }
  std::size_t fc1_b_offset() const { return fc1_w_offset() + hidden_ * feature_dim_; }
  std::size_t fc2_w_offset() const { return fc1_b_offset() + hidden_; }
  std::size_t fc2_b_offset() const { return fc2_w_offset() + kClassCount * hidden_; }
  std::size_t conv_offset() const { return fc2_b_offset() + kClassCount; }

  std::span<const double> conv_weights() const {
    return std::span<const double>(params_).subspan(conv_offset());
  }

  // Named [offset, size) ranges in file order, for per-tensor diagnostics.
  struct Tensor {
    std::string name;
    std::size_t offset;
    std::size_t size;
  };
  std::vector<Tensor> Tensors() const;

  void RoundToFloat();

 private:
  Frontend frontend_ = Frontend::kMfcc;
  std::size_t feature_dim_ = 0;
  std::size_t hidden_ = 0;
  int conv_channels_ = 0;
  ConvStackSpec conv_spec_;
  std::vector<double> params_;
};

inline constexpr std::uint8_t kModelVersion = 1;

// "DVMD", u8 version, u8 frontend, u32le feature dim, u32le hidden,
// u32le conv channels, then every parameter as f32le in file order.
std::vector<std::uint8_t> SerializeModel(const ClassifierModel& model);
ClassifierModel DeserializeModel(std::span<const std::uint8_t> bytes);
void SaveModel(const ClassifierModel& model, const std::string& path);
ClassifierModel LoadModel(const std::string& path);

}  // namespace dualvoice

#endif  // DUALVOICE_CLASSIFIER_MODEL_H_
