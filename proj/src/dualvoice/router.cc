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

#include "dualvoice/router.h"

#include <algorithm>

#include "dualvoice/classifier.h"

namespace dualvoice {

const char* ChannelName(Channel channel) {
  return channel == Channel::kNormalStream ? "normal" : "whisper";
}

std::vector<LabelSmoother::Decision> LabelSmoother::Push(
    const SegmentLabel& raw) {
  std::vector<Decision> out;
  const std::uint64_t position = next_position_++;
  const bool speech = raw.kind != Label::kSilence;
  if (pending_) {
    out.push_back(Finalize(speech ? std::optional<Label>(raw.kind)
                                  : std::nullopt));
  }
  if (!speech) {
    out.push_back({position, raw});
    left_.reset();
    last_smoothed_.reset();
  } else {
    pending_ = raw;
    pending_position_ = position;
  }
  return out;
}

std::vector<LabelSmoother::Decision> LabelSmoother::Flush() {
  std::vector<Decision> out;
  if (pending_) out.push_back(Finalize(std::nullopt));
  return out;
}

LabelSmoother::Decision LabelSmoother::Finalize(std::optional<Label> right) {
  const SegmentLabel raw = *pending_;
  int normal = 0, whisper = 0;
  for (auto l : {left_, std::optional<Label>(raw.kind), right}) {
    if (!l) continue;
    (*l == Label::kWhisper ? whisper : normal)++;
  }
  Label kind;
  if (normal != whisper) {
    kind = normal > whisper ? Label::kNormal : Label::kWhisper;
  } else {
    kind = last_smoothed_.value_or(raw.kind);
  }
  Decision d{pending_position_, {kind, kind == raw.kind ? raw.confidence
                                               : 1.0 - raw.confidence}};
  left_ = raw.kind;
  last_smoothed_ = kind;
  pending_.reset();
  return d;
}

std::vector<SegmentLabel> SmoothLabels(std::span<const SegmentLabel> raw) {
  std::vector<SegmentLabel> out(raw.size());
  LabelSmoother smoother;
  auto take = [&](const std::vector<LabelSmoother::Decision>& ds) {
    for (const auto& d : ds) out[d.position] = d.label;
  };
  for (const auto& r : raw) take(smoother.Push(r));
  take(smoother.Flush());
  return out;
}

std::vector<LabeledSegment> LabelStream(std::span<const AudioSegment> segments,
                                        const ClassifierModel& model,
                                        double gate_db) {
  std::vector<LabeledSegment> out(segments.size());
  std::vector<SegmentLabel> raw(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    out[i].segment = segments[i];
    auto gated = Gate(segments[i], gate_db);
    raw[i] = gated ? *gated : Classify(segments[i], model);
    out[i].raw = raw[i];
  }
  auto smoothed = SmoothLabels(raw);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].smoothed = smoothed[i];
  return out;
}

RoutedStreams Route(std::span<const LabeledSegment> labeled) {
  RoutedStreams streams;
  streams.normal.reserve(labeled.size());
  streams.whisper.reserve(labeled.size());
  for (const auto& ls : labeled) {
    for (Channel ch : {Channel::kNormalStream, Channel::kWhisperStream}) {
      RoutedPacket p;
      p.channel = ch;
      p.index = ls.segment.index;
      const Label wanted =
          ch == Channel::kNormalStream ? Label::kNormal : Label::kWhisper;
      p.original = ls.smoothed.kind == wanted;
      if (p.original) p.samples = ls.segment.samples;
      (ch == Channel::kNormalStream ? streams.normal : streams.whisper)
          .push_back(p);
    }
  }
  return streams;
}

std::vector<double> Flatten(std::span<const RoutedPacket> packets) {
  std::vector<double> out;
  out.reserve(packets.size() * kPacketSamples);
  for (const auto& p : packets) out.insert(out.end(), p.samples.begin(), p.samples.end());
  return out;
}

StreamRouter::StreamRouter(const ClassifierModel& model, double gate_db)
    : model_(model), gate_db_(gate_db) {}

StreamRouter::Output StreamRouter::Push(std::span<const double> samples) {
  Output out;
  for (auto& seg : segmenter_.Push(samples)) {
    LabeledSegment ls;
    auto gated = Gate(seg, gate_db_);
    ls.raw = gated ? *gated : Classify(seg, model_);
    ls.segment = std::move(seg);
    waiting_.push_back(ls);
    auto part = Emit(smoother_.Push(ls.raw));
    out.labeled.insert(out.labeled.end(), part.labeled.begin(), part.labeled.end());
    out.routed.normal.insert(out.routed.normal.end(), part.routed.normal.begin(),
                             part.routed.normal.end());
    out.routed.whisper.insert(out.routed.whisper.end(),
                              part.routed.whisper.begin(),
                              part.routed.whisper.end());
  }
  return out;
}

StreamRouter::Output StreamRouter::Flush() { return Emit(smoother_.Flush()); }

StreamRouter::Output StreamRouter::Emit(
    const std::vector<LabelSmoother::Decision>& decisions) {
  Output out;
  for (const auto& d : decisions) {
    // Decisions arrive in push order, so the oldest waiting segment is next.
    LabeledSegment ls = waiting_.front();
    waiting_.erase(waiting_.begin());
    ls.smoothed = d.label;
    out.labeled.push_back(ls);
  }
  out.routed = Route(out.labeled);
  return out;
}

}  // namespace dualvoice
