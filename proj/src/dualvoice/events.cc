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

#include "dualvoice/events.h"

#include "dualvoice/error.h"
#include <nlohmann/json.hpp>

namespace dualvoice {

using ordered_json = nlohmann::ordered_json;

const char* EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kLabel: return "label";
    case EventKind::kTranscript: return "transcript";
    case EventKind::kEditorState: return "editor_state";
    case EventKind::kMenu: return "menu";
    case EventKind::kWarning: return "warning";
  }
  return "warning";
}

std::string LabelPayload(std::uint64_t index, const SegmentLabel& raw,
                         const SegmentLabel& smoothed) {
  ordered_json j;
  j["index"] = index;
  j["raw"] = LabelName(raw.kind);
  j["smoothed"] = LabelName(smoothed.kind);
  j["confidence"] = smoothed.confidence;
  return j.dump();
}

std::string TranscriptPayload(const TranscriptEvent& event) {
  return EncodeTranscript(event);
}

namespace {

ordered_json MenuJson(const CandidateMenu& menu) {
  ordered_json j;
  j["candidates"] = menu.candidates;
  j["target"] = {menu.target.begin, menu.target.end};
  return j;
}

}  // namespace

std::string EditorStatePayload(const EditorState& state) {
  ordered_json j;
  j["text"] = state.text;
  if (state.last_utterance) {
    j["last_utterance"] = {state.last_utterance->begin, state.last_utterance->end};
  } else {
    j["last_utterance"] = nullptr;
  }
  j["menu"] = state.menu ? MenuJson(*state.menu) : ordered_json(nullptr);
  return j.dump();
}

std::string MenuPayload(const CandidateMenu& menu) { return MenuJson(menu).dump(); }

std::string WarningPayload(const std::string& message) {
  ordered_json j;
  j["message"] = message;
  return j.dump();
}

std::string EncodeConsoleEvent(std::uint64_t seq, EventKind kind,
                               const std::string& payload_json) {
  ordered_json j;
  j["seq"] = seq;
  j["kind"] = EventKindName(kind);
  j["payload"] = ordered_json::parse(payload_json);
  return j.dump();
}

std::uint64_t EventLog::Append(EventKind kind, const std::string& payload_json) {
  Sink sink;
  std::string line;
  std::uint64_t seq;
  {
    std::lock_guard<std::mutex> lock(mu_);
    seq = ++last_seq_;
    line = EncodeConsoleEvent(seq, kind, payload_json);
    lines_.push_back(line);
    sink = sink_;
  }
  if (sink) sink(line);
  return seq;
}

std::uint64_t EventLog::NextSeq() {
  std::lock_guard<std::mutex> lock(mu_);
  return ++last_seq_;
}

void EventLog::SetSink(Sink sink) {
  std::lock_guard<std::mutex> lock(mu_);
  sink_ = std::move(sink);
}

std::vector<std::string> EventLog::lines() const {
  std::lock_guard<std::mutex> lock(mu_);
  return lines_;
}

ApplyOutcome ApplyAndLog(CommandEngine& engine, const TranscriptEvent& event,
                         EventLog& log) {
  log.Append(EventKind::kTranscript, TranscriptPayload(event));
  const bool menu_was_open = engine.state().menu.has_value();
  ApplyOutcome outcome = engine.Apply(event);
  for (const auto& w : outcome.warnings) {
    log.Append(EventKind::kWarning, WarningPayload(w));
  }
  if (outcome.menu_opened && engine.state().menu) {
    log.Append(EventKind::kMenu, MenuPayload(*engine.state().menu));
  }
  if (outcome.changed || outcome.menu_opened ||
      menu_was_open != engine.state().menu.has_value()) {
    log.Append(EventKind::kEditorState, EditorStatePayload(engine.state()));
  }
  return outcome;
}

std::string ReplayDocument(const std::vector<std::string>& lines) {
  std::string text;
  std::uint64_t last = 0;
  for (const auto& line : lines) {
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat, std::string("event log: ") + e.what());
    }
    const auto seq = j.value("seq", std::uint64_t{0});
    if (seq <= last) throw Error(ErrorCode::kFormat, "event log: seq not increasing");
    last = seq;
    if (j.value("kind", "") == "editor_state") {
      text = j.at("payload").at("text").get<std::string>();
    }
  }
  return text;
}

}  // namespace dualvoice
