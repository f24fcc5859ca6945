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

#include "dualvoice/conv_stack.h"

#include <cmath>
#include <numbers>

#include "dualvoice/error.h"

namespace dualvoice {
namespace {

constexpr std::array<int, kConvBlockCount> kKernels = {10, 3, 3, 3, 3, 2, 2};
constexpr std::array<int, kConvBlockCount> kStrides = {5, 2, 2, 2, 2, 2, 2};

std::size_t OutLength(std::size_t in, int kernel, int stride) {
  if (in < static_cast<std::size_t>(kernel)) return 0;
  return (in - kernel) / stride + 1;
}

// [out][in][k] -> [out][k][in] so one output is a single contiguous dot
// product against the input window.
std::vector<double> Transpose(std::span<const double> w, int out, int in,
                              int k) {
  std::vector<double> t(w.size());
  for (int o = 0; o < out; ++o)
    for (int c = 0; c < in; ++c)
      for (int j = 0; j < k; ++j)
        t[(o * k + j) * in + c] = w[(o * in + c) * k + j];
  return t;
}

double Dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void Axpy(double* y, const double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

ConvStackSpec ConvStackSpec::WithChannels(int channels) {
  ConvStackSpec spec;
  for (std::size_t b = 0; b < kConvBlockCount; ++b) {
    spec.blocks[b] = ConvBlock{channels, kKernels[b], kStrides[b]};
  }
  return spec;
}

std::size_t ConvStackSpec::block_weight_count(std::size_t b) const {
  return static_cast<std::size_t>(blocks[b].channels) * input_channels(b) *
         blocks[b].kernel;
}

std::size_t ConvStackSpec::weight_count() const {
  std::size_t total = 0;
  for (std::size_t b = 0; b < kConvBlockCount; ++b) total += block_weight_count(b);
  return total;
}

bool ConvStackSpec::Valid() const {
  for (const auto& b : blocks) {
    if (b.channels <= 0 || b.kernel <= 0 || b.stride <= 0) return false;
  }
  return true;
}

std::size_t FrameCount(std::size_t samples, const ConvStackSpec& spec) {
  std::size_t len = samples;
  for (const auto& b : spec.blocks) len = OutLength(len, b.kernel, b.stride);
  return len;
}

double Gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double GeluDerivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf =
      std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

FeatureSequence ConvExtract(std::span<const double> samples,
                            const ConvStackSpec& spec,
                            std::span<const double> weights,
                            ConvCache* cache) {
  if (weights.size() != spec.weight_count()) {
    throw Error(ErrorCode::kInvalidArgument, "conv weights do not match spec");
  }
  ConvCache local;
  ConvCache& c = cache ? *cache : local;
  c.lengths[0] = samples.size();

  std::vector<double> input(samples.begin(), samples.end());
  std::size_t offset = 0;
  for (std::size_t b = 0; b < kConvBlockCount; ++b) {
    const auto& blk = spec.blocks[b];
    const int in_ch = spec.input_channels(b);
    const std::size_t count = spec.block_weight_count(b);
    const std::size_t len_in = c.lengths[b];
    const std::size_t len_out = OutLength(len_in, blk.kernel, blk.stride);
    c.lengths[b + 1] = len_out;

    auto wt = Transpose(weights.subspan(offset, count), blk.channels, in_ch,
                        blk.kernel);
    offset += count;
    const std::size_t window = static_cast<std::size_t>(blk.kernel) * in_ch;

    auto& pre = c.pre[b];
    auto& post = c.post[b];
    pre.assign(len_out * blk.channels, 0.0);
    post.assign(len_out * blk.channels, 0.0);
    for (std::size_t t = 0; t < len_out; ++t) {
      const double* x = input.data() + t * blk.stride * in_ch;
      for (int o = 0; o < blk.channels; ++o) {
        const double u = Dot(wt.data() + o * window, x, window);
        pre[t * blk.channels + o] = u;
        post[t * blk.channels + o] = spec.gelu ? Gelu(u) : u;
      }
    }
    input = post;
  }

  FeatureSequence out(c.lengths[kConvBlockCount], spec.output_channels());
  out.data() = input;
  return out;
}

void ConvBackward(std::span<const double> samples, const ConvStackSpec& spec,
                  std::span<const double> weights, const ConvCache& cache,
                  std::span<const double> feature_grad,
                  std::span<double> weight_grad) {
  std::vector<std::size_t> offsets(kConvBlockCount);
  std::size_t offset = 0;
  for (std::size_t b = 0; b < kConvBlockCount; ++b) {
    offsets[b] = offset;
    offset += spec.block_weight_count(b);
  }

  std::vector<double> grad_out(feature_grad.begin(), feature_grad.end());
  for (std::size_t b = kConvBlockCount; b-- > 0;) {
    const auto& blk = spec.blocks[b];
    const int in_ch = spec.input_channels(b);
    const std::size_t count = spec.block_weight_count(b);
    const std::size_t len_out = cache.lengths[b + 1];
    const std::size_t window = static_cast<std::size_t>(blk.kernel) * in_ch;
    const double* input =
        b == 0 ? samples.data() : cache.post[b - 1].data();

    auto wt = Transpose(weights.subspan(offsets[b], count), blk.channels,
                        in_ch, blk.kernel);
    std::vector<double> dwt(count, 0.0);
    std::vector<double> grad_in(b == 0 ? 0 : cache.lengths[b] * in_ch, 0.0);

    for (std::size_t t = 0; t < len_out; ++t) {
      const std::size_t in_pos = t * blk.stride * in_ch;
      for (int o = 0; o < blk.channels; ++o) {
        const std::size_t idx = t * blk.channels + o;
        double g = grad_out[idx];
        if (spec.gelu) g *= GeluDerivative(cache.pre[b][idx]);
        if (g == 0.0) continue;
        Axpy(dwt.data() + o * window, input + in_pos, g, window);
        if (b > 0) Axpy(grad_in.data() + in_pos, wt.data() + o * window, g, window);
      }
    }

    double* dst = weight_grad.data() + offsets[b];
    for (int o = 0; o < blk.channels; ++o)
      for (int c = 0; c < in_ch; ++c)
        for (int j = 0; j < blk.kernel; ++j)
          dst[(o * in_ch + c) * blk.kernel + j] +=
              dwt[(o * blk.kernel + j) * in_ch + c];
    grad_out = std::move(grad_in);
  }
}

}  // namespace dualvoice
