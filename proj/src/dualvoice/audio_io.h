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

#ifndef DUALVOICE_AUDIO_IO_H_
#define DUALVOICE_AUDIO_IO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dualvoice {

inline constexpr int kSampleRate = 16000;
inline constexpr std::size_t kPacketSamples = 1600;  // 100 ms
inline constexpr double kDefaultGateDb = -20.0;
// Reported for all-zero input instead of -inf.
inline constexpr double kSilenceFloorDb = -300.0;

// Values double as the wire LABEL kind byte.
enum class Label : std::uint8_t { kNormal = 0, kWhisper = 1, kSilence = 2 };

const char* LabelName(Label label);

struct SegmentLabel {
  Label kind = Label::kNormal;
  double confidence = 1.0;
};

// One 100 ms packet. Samples are normalized to [-1, 1].
struct AudioSegment {
  std::array<double, kPacketSamples> samples{};
  std::uint64_t index = 0;
};

struct WavData {
  std::vector<double> samples;
  int sample_rate = kSampleRate;
};

// Reads a RIFF/WAVE PCM16LE mono 16 kHz file. Samples are scaled by 1/32768.
WavData ReadWav(const std::string& path);
WavData DecodeWav(std::span<const std::uint8_t> bytes);

// Writes PCM16LE mono 16 kHz. Values are clamped to [-1, 1) before quantizing.
void WriteWav(const std::string& path, std::span<const double> samples);
std::vector<std::uint8_t> EncodeWav(std::span<const double> samples);

std::int16_t QuantizeSample(double value);

struct OfflineSegmentation {
  std::vector<AudioSegment> segments;
  std::size_t dropped_samples = 0;
};

// Non-overlapping 1,600-sample windows; a short tail is dropped and counted.
OfflineSegmentation SegmentStream(std::span<const double> samples);

// Buffers a trailing partial packet until more samples arrive.
// Single producer, single consumer.
class StreamSegmenter {
 public:
  // Returns every packet completed by this push.
  std::vector<AudioSegment> Push(std::span<const double> samples);

  std::size_t buffered() const { return fill_; }
  std::uint64_t next_index() const { return next_index_; }

 private:
  std::array<double, kPacketSamples> buffer_{};
  std::size_t fill_ = 0;
  std::uint64_t next_index_ = 0;
};

// 20*log10(RMS) relative to full scale 1.0; kSilenceFloorDb when RMS is 0.
double PowerDbfs(std::span<const double> samples);
inline double SegmentPowerDbfs(const AudioSegment& seg) {
  return PowerDbfs(seg.samples);
}

// Silence when the segment power is below the threshold, nothing otherwise.
std::optional<SegmentLabel> Gate(const AudioSegment& seg,
                                 double threshold_db = kDefaultGateDb);

}  // namespace dualvoice

#endif  // DUALVOICE_AUDIO_IO_H_
