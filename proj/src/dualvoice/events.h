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

#ifndef DUALVOICE_EVENTS_H_
#define DUALVOICE_EVENTS_H_

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "dualvoice/command_engine.h"
#include "dualvoice/router.h"

namespace dualvoice {

// Kinds carried on the console push channel.
enum class EventKind { kLabel, kTranscript, kEditorState, kMenu, kWarning };

const char* EventKindName(EventKind kind);

// Payload builders; each returns a JSON object as text.
std::string LabelPayload(std::uint64_t index, const SegmentLabel& raw,
                         const SegmentLabel& smoothed);
std::string TranscriptPayload(const TranscriptEvent& event);
std::string EditorStatePayload(const EditorState& state);
std::string MenuPayload(const CandidateMenu& menu);
std::string WarningPayload(const std::string& message);

// `{"seq":N,"kind":"...","payload":{...}}`
std::string EncodeConsoleEvent(std::uint64_t seq, EventKind kind,
                               const std::string& payload_json);

// Append-only state-change log. Sequence numbers start at 1 and strictly
// increase; every appended line is also handed to the sink, if any.
class EventLog {
 public:
  using Sink = std::function<void(const std::string& line)>;

  std::uint64_t Append(EventKind kind, const std::string& payload_json);
  // Reserves a sequence number without recording a line (used for
  // per-client snapshots).
  std::uint64_t NextSeq();
  void SetSink(Sink sink);

  std::vector<std::string> lines() const;

 private:
  mutable std::mutex mu_;
  std::uint64_t last_seq_ = 0;
  std::vector<std::string> lines_;
  Sink sink_;
};

// Applies one transcript to the engine and logs transcript, editor_state,
// menu and warning events. Returns the engine outcome.
ApplyOutcome ApplyAndLog(CommandEngine& engine, const TranscriptEvent& event,
                         EventLog& log);

// Rebuilds the document from a log by taking the last editor_state event.
std::string ReplayDocument(const std::vector<std::string>& lines);

}  // namespace dualvoice

#endif  // DUALVOICE_EVENTS_H_
