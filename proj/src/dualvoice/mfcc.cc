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

#include "dualvoice/mfcc.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "dualvoice/audio_io.h"
#include "dualvoice/error.h"

namespace dualvoice {

void Fft(std::span<std::complex<double>> data) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "fft size must be a power of 2");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  // Direct twiddles for the largest stage; smaller stages stride through it.
  std::vector<std::complex<double>> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(n);
    twiddle[k] = {std::cos(angle), std::sin(angle)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        auto u = data[start + k];
        auto v = data[start + k + len / 2] * twiddle[k * stride];
        data[start + k] = u + v;
        data[start + k + len / 2] = u - v;
      }
    }
  }
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> DctII(std::span<const double> input) {
  const std::size_t n = input.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += input[i] * std::cos(std::numbers::pi * k * (i + 0.5) / n);
    }
    out[k] = sum * std::sqrt((k == 0 ? 1.0 : 2.0) / n);
  }
  return out;
}

std::vector<double> InverseDctII(std::span<const double> coeffs) {
  const std::size_t n = coeffs.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sum += coeffs[k] * std::sqrt((k == 0 ? 1.0 : 2.0) / n) *
             std::cos(std::numbers::pi * k * (i + 0.5) / n);
    }
    out[i] = sum;
  }
  return out;
}

std::size_t MfccFrameCount(std::size_t samples) {
  if (samples < kMfccFrameLength) return 0;
  return (samples - kMfccFrameLength) / kMfccHop + 1;
}

MfccExtractor::MfccExtractor()
    : window_(kMfccFrameLength),
      edges_hz_(kMelFilterCount + 2),
      weights_(kMelFilterCount * kBins, 0.0),
      dct_(kMfccCoefficients * kMelFilterCount) {
  for (std::size_t c = 0; c < kMfccCoefficients; ++c) {
    const double scale = std::sqrt((c == 0 ? 1.0 : 2.0) / kMelFilterCount);
    for (std::size_t m = 0; m < kMelFilterCount; ++m) {
      dct_[c * kMelFilterCount + m] =
          scale * std::cos(std::numbers::pi * c * (m + 0.5) / kMelFilterCount);
    }
  }
  for (std::size_t i = 0; i < kMfccFrameLength; ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i /
                                      (kMfccFrameLength - 1));
  }
  const double mel_hi = HzToMel(kSampleRate / 2.0);
  for (std::size_t i = 0; i < edges_hz_.size(); ++i) {
    edges_hz_[i] = MelToHz(mel_hi * i / (kMelFilterCount + 1));
  }
  for (std::size_t m = 0; m < kMelFilterCount; ++m) {
    const double lo = edges_hz_[m], mid = edges_hz_[m + 1],
                 hi = edges_hz_[m + 2];
    for (std::size_t k = 0; k < kBins; ++k) {
      const double f = static_cast<double>(k) * kSampleRate / kMfccFftSize;
      double w = 0.0;
      if (f > lo && f < mid) {
        w = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      weights_[m * kBins + k] = w;
    }
  }
}

const MfccExtractor& MfccExtractor::Default() {
  static const MfccExtractor extractor;
  return extractor;
}

std::vector<double> MfccExtractor::MagnitudeSpectrum(
    std::span<const double> frame) const {
  std::vector<std::complex<double>> buf(kMfccFftSize);
  const std::size_t n = std::min(frame.size(), kMfccFrameLength);
  for (std::size_t i = 0; i < n; ++i) buf[i] = frame[i] * window_[i];
  Fft(buf);
  std::vector<double> mag(kBins);
  for (std::size_t k = 0; k < kBins; ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

std::vector<double> MfccExtractor::LogMelEnergies(
    std::span<const double> frame) const {
  auto mag = MagnitudeSpectrum(frame);
  std::vector<double> out(kMelFilterCount);
  for (std::size_t m = 0; m < kMelFilterCount; ++m) {
    double e = 0.0;
    for (std::size_t k = 0; k < kBins; ++k) e += weights_[m * kBins + k] * mag[k];
    out[m] = std::log(std::max(e, kLogFloor));
  }
  return out;
}

FeatureSequence MfccExtractor::Compute(std::span<const double> samples) const {
  const std::size_t frames = MfccFrameCount(samples.size());
  FeatureSequence out(frames, kMfccCoefficients);
  for (std::size_t t = 0; t < frames; ++t) {
    auto log_mel =
        LogMelEnergies(samples.subspan(t * kMfccHop, kMfccFrameLength));
    auto dst = out.frame(t);
    for (std::size_t c = 0; c < kMfccCoefficients; ++c) {
      double sum = 0.0;
      for (std::size_t m = 0; m < kMelFilterCount; ++m) {
        sum += dct_[c * kMelFilterCount + m] * log_mel[m];
      }
      dst[c] = sum;
    }
  }
  return out;
}

}  // namespace dualvoice
