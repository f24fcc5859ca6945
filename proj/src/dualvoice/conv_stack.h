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

#ifndef DUALVOICE_CONV_STACK_H_
#define DUALVOICE_CONV_STACK_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "dualvoice/features.h"

namespace dualvoice {

struct ConvBlock {
  int channels = 512;
  int kernel = 1;
  int stride = 1;
};

inline constexpr std::size_t kConvBlockCount = 7;
inline constexpr int kFullConvChannels = 512;
inline constexpr int kDeskConvChannels = 64;

// Seven valid (unpadded), bias-free temporal convolutions, each followed by
// GELU. Kernels (10,3,3,3,3,2,2), strides (5,2,2,2,2,2,2): a 320-sample
// receptive hop, i.e. one frame per 20 ms at 16 kHz.
struct ConvStackSpec {
  std::array<ConvBlock, kConvBlockCount> blocks;
  // Off only in tests: replaces GELU by the identity.
  bool gelu = true;

  static ConvStackSpec WithChannels(int channels);
  static ConvStackSpec Full() { return WithChannels(kFullConvChannels); }
  static ConvStackSpec DeskScale() { return WithChannels(kDeskConvChannels); }

  int output_channels() const { return blocks.back().channels; }
  int input_channels(std::size_t block) const {
    return block == 0 ? 1 : blocks[block - 1].channels;
  }
  // Weights of block b, laid out [out][in][kernel].
  std::size_t block_weight_count(std::size_t b) const;
  std::size_t weight_count() const;

  bool Valid() const;
};

// L -> floor((L - k) / s) + 1 per block, 0 once L < k.
std::size_t FrameCount(std::size_t samples, const ConvStackSpec& spec);

double Gelu(double x);
double GeluDerivative(double x);

// Activations kept for the backward pass; layouts are [time][channel].
struct ConvCache {
  std::array<std::vector<double>, kConvBlockCount> pre;   // pre-activation
  std::array<std::vector<double>, kConvBlockCount> post;  // block outputs
  std::array<std::size_t, kConvBlockCount + 1> lengths{};
};

FeatureSequence ConvExtract(std::span<const double> samples,
                            const ConvStackSpec& spec,
                            std::span<const double> weights,
                            ConvCache* cache = nullptr);

// Accumulates d(loss)/d(weights) into weight_grad given d(loss)/d(features).
void ConvBackward(std::span<const double> samples, const ConvStackSpec& spec,
                  std::span<const double> weights, const ConvCache& cache,
                  std::span<const double> feature_grad,
                  std::span<double> weight_grad);

}  // namespace dualvoice

#endif  // DUALVOICE_CONV_STACK_H_
