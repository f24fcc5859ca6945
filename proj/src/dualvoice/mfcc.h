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

#ifndef DUALVOICE_MFCC_H_
#define DUALVOICE_MFCC_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dualvoice/features.h"

namespace dualvoice {

inline constexpr std::size_t kMfccFrameLength = 400;  // 25 ms
inline constexpr std::size_t kMfccHop = 160;          // 10 ms
inline constexpr std::size_t kMfccFftSize = 512;
inline constexpr std::size_t kMelFilterCount = 40;
inline constexpr std::size_t kMfccCoefficients = 13;
inline constexpr double kLogFloor = 1e-10;

// In-place radix-2 FFT; size must be a power of two.
void Fft(std::span<std::complex<double>> data);

double HzToMel(double hz);
double MelToHz(double mel);

// Orthonormal DCT-II and its inverse (DCT-III) over the full length.
std::vector<double> DctII(std::span<const double> input);
std::vector<double> InverseDctII(std::span<const double> coeffs);

std::size_t MfccFrameCount(std::size_t samples);

// 25 ms Hann frames, 10 ms hop, 512-point magnitude spectrum, 40 HTK-mel
// triangles over 0-8 kHz, natural log floored at 1e-10, orthonormal DCT-II,
// coefficients 0..12.
class MfccExtractor {
 public:
  MfccExtractor();

  static const MfccExtractor& Default();

  FeatureSequence Compute(std::span<const double> samples) const;

  // Stages for one 400-sample frame, exposed for verification.
  std::vector<double> MagnitudeSpectrum(std::span<const double> frame) const;
  std::vector<double> LogMelEnergies(std::span<const double> frame) const;

  // Filter m spans edges [m, m+2] and peaks at edge m+1 (Hz).
  const std::vector<double>& filter_edges_hz() const { return edges_hz_; }
  double filter_center_hz(std::size_t m) const { return edges_hz_[m + 1]; }
  // Weight of filter m at FFT bin k.
  double filter_weight(std::size_t m, std::size_t k) const {
    return weights_[m * kBins + k];
  }

  static constexpr std::size_t kBins = kMfccFftSize / 2 + 1;

 private:
  std::vector<double> window_;
  std::vector<double> edges_hz_;
  std::vector<double> weights_;  // kMelFilterCount x kBins
  std::vector<double> dct_;      // kMfccCoefficients x kMelFilterCount, orthonormal rows
};

inline FeatureSequence Mfcc(std::span<const double> samples) {
  return MfccExtractor::Default().Compute(samples);
}

}  // namespace dualvoice

#endif  // DUALVOICE_MFCC_H_
