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

#include "dualvoice/audio_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dualvoice/error.h"

namespace dualvoice {
namespace {

std::uint32_t ReadU32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

std::uint16_t ReadU16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

}  // namespace

const char* LabelName(Label label) {
  switch (label) {
    case Label::kNormal:
      return "normal";
    case Label::kWhisper:
      return "whisper";
    case Label::kSilence:
      return "silence";
  }
  return "unknown";
}

WavData DecodeWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kFormat, "wav: missing RIFF/WAVE header");
  }
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    std::uint32_t size = ReadU32(chunk + 4);
    std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      throw Error(ErrorCode::kFormat, "wav: chunk overruns file");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw Error(ErrorCode::kFormat, "wav: short fmt chunk");
      const std::uint8_t* f = bytes.data() + body;
      std::uint16_t format = ReadU16(f);
      std::uint16_t channels = ReadU16(f + 2);
      std::uint32_t rate = ReadU32(f + 4);
      std::uint16_t bits = ReadU16(f + 14);
      if (format != 1) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "wav: audio_format " + std::to_string(format) +
                        " is not PCM");
      }
      if (channels != 1) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "wav: channels " + std::to_string(channels) +
                        " (mono required)");
      }
      if (rate != kSampleRate) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "wav: sample_rate " + std::to_string(rate) +
                        " (16000 required)");
      }
      if (bits != 16) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "wav: bits_per_sample " + std::to_string(bits) +
                        " (16 required)");
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorCode::kFormat, "wav: data before fmt");
      if (size % 2 != 0) throw Error(ErrorCode::kFormat, "wav: odd data size");
      WavData wav;
      wav.samples.resize(size / 2);
      const std::uint8_t* d = bytes.data() + body;
      for (std::size_t i = 0; i < wav.samples.size(); ++i) {
        auto v = static_cast<std::int16_t>(ReadU16(d + 2 * i));
        wav.samples[i] = v / 32768.0;
      }
      return wav;
    }
    pos = body + size + (size & 1);
  }
  throw Error(ErrorCode::kFormat, "wav: no data chunk");
}

WavData ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodeWav(bytes);
}

std::int16_t QuantizeSample(double value) {
  double scaled = std::round(std::clamp(value, -1.0, 1.0) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::vector<std::uint8_t> EncodeWav(std::span<const double> samples) {
  const auto data_size = static_cast<std::uint32_t>(samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(out, 16);
  PutU16(out, 1);  // PCM
  PutU16(out, 1);  // mono
  PutU32(out, kSampleRate);
  PutU32(out, kSampleRate * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(out, data_size);
  for (double s : samples) {
    PutU16(out, static_cast<std::uint16_t>(QuantizeSample(s)));
  }
  return out;
}

void WriteWav(const std::string& path, std::span<const double> samples) {
  auto bytes = EncodeWav(samples);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path);
}

OfflineSegmentation SegmentStream(std::span<const double> samples) {
  OfflineSegmentation result;
  const std::size_t count = samples.size() / kPacketSamples;
  result.segments.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto src = samples.subspan(i * kPacketSamples, kPacketSamples);
    std::copy(src.begin(), src.end(), result.segments[i].samples.begin());
    result.segments[i].index = i;
  }
  result.dropped_samples = samples.size() - count * kPacketSamples;
  return result;
}

std::vector<AudioSegment> StreamSegmenter::Push(
    std::span<const double> samples) {
  std::vector<AudioSegment> out;
  while (!samples.empty()) {
    std::size_t take = std::min(kPacketSamples - fill_, samples.size());
    std::copy_n(samples.begin(), take, buffer_.begin() + fill_);
    fill_ += take;
    samples = samples.subspan(take);
    if (fill_ == kPacketSamples) {
      AudioSegment seg;
      seg.samples = buffer_;
      seg.index = next_index_++;
      out.push_back(seg);
      fill_ = 0;
    }
  }
  return out;
}

double PowerDbfs(std::span<const double> samples) {
  if (samples.empty()) return kSilenceFloorDb;
  double sum = 0.0;
  for (double s : samples) sum += s * s;
  if (sum == 0.0) return kSilenceFloorDb;
  double rms = std::sqrt(sum / static_cast<double>(samples.size()));
  return std::max(20.0 * std::log10(rms), kSilenceFloorDb);
}

std::optional<SegmentLabel> Gate(const AudioSegment& seg, double threshold_db) {
  if (SegmentPowerDbfs(seg) < threshold_db) {
    return SegmentLabel{Label::kSilence, 1.0};
  }
  return std::nullopt;
}

}  // namespace dualvoice
