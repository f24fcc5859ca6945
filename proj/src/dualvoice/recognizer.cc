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

#include "dualvoice/recognizer.h"

#include <algorithm>

#include "dualvoice/error.h"
#include "dualvoice/wire.h"
#include <nlohmann/json.hpp>

namespace dualvoice {

using ordered_json = nlohmann::ordered_json;

std::string EncodeTranscript(const TranscriptEvent& event) {
  ordered_json j;
  j["channel"] = ChannelName(event.channel);
  j["text"] = event.text;
  j["alternatives"] = event.alternatives;
  j["t_start"] = event.t_start;
  j["t_end"] = event.t_end;
  return j.dump();
}

TranscriptEvent DecodeTranscript(const std::string& payload) {
  TranscriptEvent ev;
  try {
    auto j = nlohmann::json::parse(payload);
    const std::string channel = j.at("channel").get<std::string>();
    if (channel == "normal") {
      ev.channel = Channel::kNormalStream;
    } else if (channel == "whisper") {
      ev.channel = Channel::kWhisperStream;
    } else {
      throw Error(ErrorCode::kProtocol, "transcript: bad channel " + channel);
    }
    ev.text = j.at("text").get<std::string>();
    ev.alternatives = j.at("alternatives").get<std::vector<std::string>>();
    ev.t_start = j.at("t_start").get<std::uint64_t>();
    ev.t_end = j.at("t_end").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProtocol, std::string("transcript: ") + e.what());
  }
  if (ev.alternatives.empty()) {
    throw Error(ErrorCode::kProtocol, "transcript: empty alternatives");
  }
  if (ev.alternatives.front() != ev.text) {
    throw Error(ErrorCode::kProtocol, "transcript: text != alternatives[0]");
  }
  if (ev.t_start > ev.t_end) {
    throw Error(ErrorCode::kProtocol, "transcript: t_start > t_end");
  }
  return ev;
}

bool IsZeroPacket(const RoutedPacket& packet) {
  return std::all_of(packet.samples.begin(), packet.samples.end(),
                     [](double s) { return s == 0.0; });
}

std::vector<UtteranceSpan> SegmentUtterances(std::span<const RoutedPacket> stream,
                                             const UtteranceBoundaryRule& rule) {
  if (rule.end_silence < 1) {
    throw Error(ErrorCode::kInvalidArgument, "end_silence must be >= 1");
  }
  std::vector<UtteranceSpan> spans;
  std::optional<UtteranceSpan> open;
  int zeros = 0;
  for (const auto& p : stream) {
    if (IsZeroPacket(p)) {
      if (open && ++zeros >= rule.end_silence) {
        spans.push_back(*open);
        open.reset();
      }
      continue;
    }
    zeros = 0;
    if (open) {
      open->end = p.index;
    } else {
      open = UtteranceSpan{p.index, p.index};
    }
  }
  if (open) spans.push_back(*open);
  return spans;
}

const LedgerEntry* UtteranceLedger::Match(const UtteranceSpan& span) const {
  const LedgerEntry* best = nullptr;
  std::uint64_t best_overlap = 0;
  for (const auto& e : entries_) {
    const std::uint64_t lo = std::max(span.start, e.first_packet);
    const std::uint64_t hi = std::min(span.end, e.last_packet);
    if (lo > hi) continue;
    const std::uint64_t overlap = hi - lo + 1;
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = &e;
    }
  }
  return best;
}

std::vector<std::string> LedgerAlternatives(const LedgerEntry& entry) {
  std::vector<std::string> alts;
  auto add = [&alts](const std::string& s) {
    if (std::find(alts.begin(), alts.end(), s) == alts.end()) alts.push_back(s);
  };
  const bool injected = entry.recognized && entry.inject_rank >= 2 &&
                        *entry.recognized != entry.text;
  if (!injected) {
    add(entry.text);
    for (const auto& a : entry.alternatives) add(a);
    return alts;
  }
  add(*entry.recognized);
  for (const auto& a : entry.alternatives) {
    if (a != entry.text) add(a);
  }
  const auto rank = std::min<std::size_t>(entry.inject_rank - 1, alts.size());
  alts.insert(alts.begin() + static_cast<std::ptrdiff_t>(rank), entry.text);
  return alts;
}

TranscriptEvent MockRecognizer::Recognize(Channel channel,
                                          const UtteranceSpan& span,
                                          std::span<const RoutedPacket>) {
  const LedgerEntry* entry = ledger_.Match(span);
  if (entry == nullptr) {
    throw Error(ErrorCode::kUnknownUtterance,
                "no ledger entry for packets " + std::to_string(span.start) +
                    ".." + std::to_string(span.end));
  }
  TranscriptEvent ev;
  ev.channel = channel;
  ev.alternatives = LedgerAlternatives(*entry);
  ev.text = ev.alternatives.front();
  ev.t_start = span.start;
  ev.t_end = span.end;
  return ev;
}

TranscriptEvent ExternalRecognizer::Recognize(
    Channel channel, const UtteranceSpan& span,
    std::span<const RoutedPacket> packets) {
  Socket conn = ConnectTcp(host_, port_);
  try {
    for (const auto& p : packets) {
      if (p.index < span.start || p.index > span.end) continue;
      WriteAll(conn, EncodeFrame(MessageType::kAudio, EncodeAudioPayload(p.samples)));
    }
    TranscriptEvent request;
    request.channel = channel;
    request.t_start = span.start;
    request.t_end = span.end;
    WriteAll(conn, EncodeTextFrame(MessageType::kTranscript,
                                   EncodeTranscript(request)));
  } catch (const Error& e) {
    throw Error(ErrorCode::kBackendUnavailable, e.what());
  }

  Frame reply;
  switch (ReadFrame(conn, &reply, timeout_)) {
    case ReadStatus::kOk:
      break;
    case ReadStatus::kTimeout:
      throw Error(ErrorCode::kBackendUnavailable, "recognizer timed out");
    case ReadStatus::kClosed:
      throw Error(ErrorCode::kBackendUnavailable, "recognizer closed connection");
    case ReadStatus::kOversized:
      throw Error(ErrorCode::kProtocol, "recognizer reply oversized");
  }
  if (reply.message_type() == MessageType::kError) {
    throw Error(ErrorCode::kProtocol,
                "recognizer error: " +
                    std::string(reply.payload.begin(), reply.payload.end()));
  }
  if (reply.message_type() != MessageType::kTranscript) {
    throw Error(ErrorCode::kProtocol, "recognizer reply is not TRANSCRIPT");
  }
  auto ev = DecodeTranscript(std::string(reply.payload.begin(), reply.payload.end()));
  if (ev.channel != channel || ev.t_start != span.start || ev.t_end != span.end) {
    throw Error(ErrorCode::kProtocol, "recognizer reply does not match request");
  }
  return ev;
}

GatewayResult RecognizeChannel(Channel channel,
                               std::span<const RoutedPacket> stream,
                               RecognizerBackend& backend,
                               const UtteranceBoundaryRule& rule) {
  GatewayResult result;
  for (const auto& span : SegmentUtterances(stream, rule)) {
    try {
      auto ev = backend.Recognize(channel, span, stream);
      ev.channel = channel;
      result.events.push_back(std::move(ev));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBackendUnavailable) throw;
      result.unrecognized.push_back(span);
    }
  }
  return result;
}

std::vector<TranscriptEvent> MergeEvents(std::span<const TranscriptEvent> normal,
                                         std::span<const TranscriptEvent> whisper) {
  std::vector<TranscriptEvent> out(whisper.begin(), whisper.end());
  out.insert(out.end(), normal.begin(), normal.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const TranscriptEvent& a, const TranscriptEvent& b) {
                     return a.t_start < b.t_start;
                   });
  return out;
}

}  // namespace dualvoice
