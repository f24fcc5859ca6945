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

#include "dualvoice/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dualvoice/error.h"

namespace dualvoice {
namespace {

constexpr double kHarmonicCeilingHz = 7800.0;
constexpr double kVoicedNoiseRatio = 0.01;
constexpr int kLevelIterations = 50;

void Resonate(std::vector<double>& x, const Formant& f) {
  const double r = std::exp(-std::numbers::pi * f.bandwidth_hz / kSampleRate);
  const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * f.center_hz / kSampleRate);
  const double a2 = -r * r;
  const double gain = 1.0 - r;
  double y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double y = gain * v + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

double Rms(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace

double DefaultLevelDbfs(Label mode) {
  return mode == Label::kWhisper ? kWhisperLevelDbfs : kNormalLevelDbfs;
}

SyntheticUtteranceSpec RandomUtteranceSpec(Label mode, std::string text,
                                           double duration_s,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  SyntheticUtteranceSpec spec;
  spec.mode = mode;
  spec.text = std::move(text);
  spec.duration_s = duration_s;
  spec.seed = seed;
  spec.level_dbfs = DefaultLevelDbfs(mode);
  spec.formants = {{uniform(300, 800), uniform(120, 180)},
                   {uniform(900, 2300), uniform(150, 220)},
                   {uniform(2400, 3200), uniform(200, 280)}};
  spec.f0_hz = uniform(kMinF0Hz, kMaxF0Hz);
  return spec;
}

std::vector<double> GenerateUtterance(const SyntheticUtteranceSpec& spec) {
  if (spec.mode != Label::kNormal && spec.mode != Label::kWhisper) {
    throw Error(ErrorCode::kInvalidArgument, "utterance mode must be normal or whisper");
  }
  if (!(spec.duration_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "utterance duration must be positive");
  }
  const bool voiced = spec.mode == Label::kNormal;
  if (voiced && (spec.f0_hz < kMinF0Hz || spec.f0_hz > kMaxF0Hz)) {
    throw Error(ErrorCode::kInvalidArgument, "f0 outside [100, 220] Hz");
  }
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * kSampleRate));
  // Separate stream from the one that drew the spec parameters.
  std::mt19937_64 rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> x(n, 0.0);
  if (voiced) {
    const int harmonics = static_cast<int>(kHarmonicCeilingHz / spec.f0_hz);
    for (int h = 1; h <= harmonics; ++h) {
      // cos(w(t+1)) = 2cos(w)cos(wt) - cos(w(t-1))
      const double w = 2.0 * std::numbers::pi * h * spec.f0_hz / kSampleRate;
      const double k = 2.0 * std::cos(w);
      double prev = std::cos(-w), cur = 1.0;
      for (std::size_t t = 0; t < n; ++t) {
        x[t] += cur;
        const double next = k * cur - prev;
        prev = cur;
        cur = next;
      }
    }
  } else {
    for (double& v : x) v = gauss(rng);
  }
  for (const auto& f : spec.formants) Resonate(x, f);
  if (voiced) {
    const double noise = kVoicedNoiseRatio * Rms(x);
    for (double& v : x) v += noise * gauss(rng);
  }

  // Scaling and clipping interact, so alternate until the level settles.
  const double target = std::pow(10.0, spec.level_dbfs / 20.0);
  for (int i = 0; i < kLevelIterations; ++i) {
    const double rms = Rms(x);
    if (rms == 0.0) break;
    const double k = target / rms;
    for (double& v : x) v = std::clamp(v * k, -1.0, 1.0);
  }
  return x;
}

double AutocorrelationPeak(std::span<const double> samples) {
  const std::size_t lo = static_cast<std::size_t>(std::ceil(kSampleRate / kMaxF0Hz));
  const std::size_t hi = static_cast<std::size_t>(std::floor(kSampleRate / kMinF0Hz));
  double best = -1.0;
  for (std::size_t lag = lo; lag <= hi && lag < samples.size(); ++lag) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i + lag < samples.size(); ++i) {
      const double a = samples[i], b = samples[i + lag];
      ab += a * b;
      aa += a * a;
      bb += b * b;
    }
    if (aa > 0.0 && bb > 0.0) best = std::max(best, ab / std::sqrt(aa * bb));
  }
  return best;
}

}  // namespace dualvoice
