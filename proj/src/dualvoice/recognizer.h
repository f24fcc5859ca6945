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

#ifndef DUALVOICE_RECOGNIZER_H_
#define DUALVOICE_RECOGNIZER_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dualvoice/router.h"

namespace dualvoice {

struct TranscriptEvent {
  Channel channel = Channel::kNormalStream;
  std::string text;
  std::vector<std::string> alternatives;  // ranked, alternatives[0] == text
  std::uint64_t t_start = 0;              // packet indices, inclusive
  std::uint64_t t_end = 0;
};

// TRANSCRIPT payload: JSON object with keys in this order:
//   channel ("normal"|"whisper"), text, alternatives[], t_start, t_end
std::string EncodeTranscript(const TranscriptEvent& event);
// Throws kProtocol on malformed JSON or a violated event invariant.
TranscriptEvent DecodeTranscript(const std::string& payload);

struct UtteranceSpan {
  std::uint64_t start = 0;  // packet indices, inclusive
  std::uint64_t end = 0;
  bool operator==(const UtteranceSpan&) const = default;
};

struct UtteranceBoundaryRule {
  int end_silence = 3;  // zero packets that close an utterance (300 ms)
};

bool IsZeroPacket(const RoutedPacket& packet);

// Maximal runs of non-zero packets, merged across gaps shorter than
// rule.end_silence.
std::vector<UtteranceSpan> SegmentUtterances(std::span<const RoutedPacket> stream,
                                             const UtteranceBoundaryRule& rule = {});

// What the synthesizer knows about one utterance it produced.
struct LedgerEntry {
  Label mode = Label::kNormal;
  std::string text;                       // what was actually said
  std::optional<std::string> recognized;  // injected misrecognition
  std::vector<std::string> alternatives;  // extra candidates
  int inject_rank = 0;                    // 1-based rank of `text` when injected
  std::uint64_t first_packet = 0;
  std::uint64_t last_packet = 0;
};

class UtteranceLedger {
 public:
  void Add(LedgerEntry entry) { entries_.push_back(std::move(entry)); }
  // Entry with the largest packet overlap, nullptr when nothing overlaps.
  const LedgerEntry* Match(const UtteranceSpan& span) const;
  const std::vector<LedgerEntry>& entries() const { return entries_; }

 private:
  std::vector<LedgerEntry> entries_;
};

// Candidate list for an entry: the recognized text first, then the scripted
// alternatives, with the true text at inject_rank when an error is injected.
std::vector<std::string> LedgerAlternatives(const LedgerEntry& entry);

class RecognizerBackend {
 public:
  virtual ~RecognizerBackend() = default;
  virtual TranscriptEvent Recognize(Channel channel, const UtteranceSpan& span,
                                    std::span<const RoutedPacket> packets) = 0;
};

// Replays the ledger. Throws kUnknownUtterance for spans it cannot place.
class MockRecognizer : public RecognizerBackend {
 public:
  explicit MockRecognizer(const UtteranceLedger& ledger) : ledger_(ledger) {}
  TranscriptEvent Recognize(Channel channel, const UtteranceSpan& span,
                            std::span<const RoutedPacket> packets) override;

 private:
  const UtteranceLedger& ledger_;
};

// Streams a span as AUDIO frames, then a TRANSCRIPT request frame (the event
// with empty text and alternatives) marking the end of the utterance, and
// waits for one TRANSCRIPT reply for the same channel and span.
class ExternalRecognizer : public RecognizerBackend {
 public:
  ExternalRecognizer(std::string host, std::uint16_t port,
                     std::chrono::milliseconds timeout = std::chrono::seconds(10))
      : host_(std::move(host)), port_(port), timeout_(timeout) {}

  // Throws kBackendUnavailable on connect failure or timeout, kProtocol on
  // a malformed reply.
  TranscriptEvent Recognize(Channel channel, const UtteranceSpan& span,
                            std::span<const RoutedPacket> packets) override;

 private:
  std::string host_;
  std::uint16_t port_;
  std::chrono::milliseconds timeout_;
};

struct GatewayResult {
  std::vector<TranscriptEvent> events;  // in t_start order
  std::vector<UtteranceSpan> unrecognized;
};

// Spans whose backend is unavailable are reported, not fatal.
GatewayResult RecognizeChannel(Channel channel,
                               std::span<const RoutedPacket> stream,
                               RecognizerBackend& backend,
                               const UtteranceBoundaryRule& rule = {});

// One queue ordered by t_start; whisper first on ties so a command applies
// to the utterance before it.
std::vector<TranscriptEvent> MergeEvents(std::span<const TranscriptEvent> normal,
                                         std::span<const TranscriptEvent> whisper);

}  // namespace dualvoice

#endif  // DUALVOICE_RECOGNIZER_H_
