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

#ifndef DUALVOICE_SYNTH_H_
#define DUALVOICE_SYNTH_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dualvoice/audio_io.h"

namespace dualvoice {

struct Formant {
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
};

// Normal voice is a band-limited harmonic pulse train at f0, whisper is
// white noise; both pass through the same cascade of two-pole resonators.
struct SyntheticUtteranceSpec {
  Label mode = Label::kNormal;
  std::string text;
  double duration_s = 0.5;
  double f0_hz = 150.0;  // ignored for whisper
  std::vector<Formant> formants;
  double level_dbfs = -6.0;
  std::uint64_t seed = 0;
};

inline constexpr double kNormalLevelDbfs = -6.0;
inline constexpr double kWhisperLevelDbfs = -15.0;
inline constexpr double kMinF0Hz = 100.0;
inline constexpr double kMaxF0Hz = 220.0;

double DefaultLevelDbfs(Label mode);

// Draws f0, three formants and their bandwidths from `seed`; level follows
// the mode.
SyntheticUtteranceSpec RandomUtteranceSpec(Label mode, std::string text,
                                           double duration_s,
                                           std::uint64_t seed);

// Deterministic in spec (including seed). Throws kInvalidArgument for a
// mode other than normal/whisper, a non-positive duration, or an f0
// outside [100, 220] Hz on a normal utterance.
std::vector<double> GenerateUtterance(const SyntheticUtteranceSpec& spec);

// Largest normalized autocorrelation over lags covering f0 in [100, 220] Hz
// (73..160 samples at 16 kHz).
double AutocorrelationPeak(std::span<const double> samples);

}  // namespace dualvoice

#endif  // DUALVOICE_SYNTH_H_
