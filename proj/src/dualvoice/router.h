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

#ifndef DUALVOICE_ROUTER_H_
#define DUALVOICE_ROUTER_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dualvoice/audio_io.h"
#include "dualvoice/classifier_model.h"

namespace dualvoice {

enum class Channel : std::uint8_t { kNormalStream = 0, kWhisperStream = 1 };

const char* ChannelName(Channel channel);

struct LabeledSegment {
  AudioSegment segment;
  SegmentLabel raw;
  SegmentLabel smoothed;
};

struct RoutedPacket {
  Channel channel = Channel::kNormalStream;
  std::array<double, kPacketSamples> samples{};  // original or zeros
  std::uint64_t index = 0;
  bool original = false;
};

struct RoutedStreams {
  std::vector<RoutedPacket> normal;
  std::vector<RoutedPacket> whisper;
};

// Majority vote over the packet and its immediate non-silence neighbours.
// Silence breaks the window and is never changed. A 1-1 tie keeps the
// previous packet's smoothed label when that packet was speech, otherwise
// the raw label. Each decision needs exactly one packet of lookahead.
class LabelSmoother {
 public:
  struct Decision {
    std::uint64_t position;  // order of Push calls, from 0
    SegmentLabel label;
  };

  // Returns decisions finalized by this label, in order.
  std::vector<Decision> Push(const SegmentLabel& raw);
  std::vector<Decision> Flush();

 private:
  Decision Finalize(std::optional<Label> right);

  std::optional<SegmentLabel> pending_;
  std::uint64_t pending_position_ = 0;
  std::optional<Label> left_;             // raw label before pending_
  std::optional<Label> last_smoothed_;    // smoothed label before pending_
  std::uint64_t next_position_ = 0;
};

std::vector<SegmentLabel> SmoothLabels(std::span<const SegmentLabel> raw);

// Gate, classify the survivors, smooth.
std::vector<LabeledSegment> LabelStream(std::span<const AudioSegment> segments,
                                        const ClassifierModel& model,
                                        double gate_db = kDefaultGateDb);

// Each stream keeps the original samples of its own class and zeros
// elsewhere; both have one packet per input segment.
RoutedStreams Route(std::span<const LabeledSegment> labeled);

std::vector<double> Flatten(std::span<const RoutedPacket> packets);

// Incremental gate -> classify -> smooth -> route for one live stream.
class StreamRouter {
 public:
  StreamRouter(const ClassifierModel& model, double gate_db);

  struct Output {
    std::vector<LabeledSegment> labeled;
    RoutedStreams routed;
  };

  Output Push(std::span<const double> samples);
  Output Flush();

 private:
  Output Emit(const std::vector<LabelSmoother::Decision>& decisions);

  const ClassifierModel& model_;
  double gate_db_;
  StreamSegmenter segmenter_;
  LabelSmoother smoother_;
  std::vector<LabeledSegment> waiting_;  // classified, not yet smoothed
};

}  // namespace dualvoice

#endif  // DUALVOICE_ROUTER_H_
