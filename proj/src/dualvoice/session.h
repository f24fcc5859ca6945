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

#ifndef DUALVOICE_SESSION_H_
#define DUALVOICE_SESSION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualvoice/classifier_model.h"
#include "dualvoice/command_engine.h"
#include "dualvoice/events.h"
#include "dualvoice/recognizer.h"

namespace dualvoice {

struct SessionStep {
  Label mode = Label::kNormal;
  std::string text;                       // what is said
  std::optional<std::string> recognized;  // injected misrecognition
  std::vector<std::string> alternatives;
  int inject_rank = 0;  // where `text` lands among the candidates
};

// JSON document:
//   {"name": str, "seed": int, "expected": str,
//    "steps": [{"mode": "normal"|"whisper", "text": str,
//               "recognized"?: str, "alternatives"?: [str],
//               "inject_rank"?: int}, ...]}
struct SessionScript {
  std::string name;
  std::uint64_t seed = 0;
  std::string expected;
  std::vector<SessionStep> steps;
};

SessionScript ParseSessionScript(const std::string& json);
SessionScript LoadSessionScript(const std::string& path);

inline constexpr int kLeadSilencePackets = 2;
inline constexpr int kGapPackets = 4;  // above the endpointing threshold
inline constexpr int kMinStepPackets = 4;
inline constexpr int kMaxStepPackets = 12;

// Packets of synthesized audio for a step: grows with its word count.
int StepPacketCount(const SessionStep& step);

struct StepReport {
  Label mode = Label::kNormal;
  std::string text;
  std::uint64_t first_packet = 0;
  std::uint64_t last_packet = 0;
  std::vector<Label> labels;  // smoothed label per packet
  std::size_t correct = 0;    // packets whose label matches the mode
};

struct SessionReport {
  std::string name;
  std::string document;
  std::string expected;
  bool pass = false;
  std::string diff;  // first divergence, empty on pass
  std::vector<StepReport> steps;
  double accuracy = 0.0;  // over step packets
  std::vector<std::string> warnings;
  std::vector<UtteranceSpan> unrecognized;
  std::vector<std::string> event_log;
};

// The script's audio: lead silence, then each step followed by a gap.
// Fills `ledger` and the step packet ranges in `steps` when non-null.
std::vector<double> RenderSessionAudio(const SessionScript& script,
                                       UtteranceLedger* ledger = nullptr,
                                       std::vector<StepReport>* steps = nullptr);

// Describes the first byte where `actual` departs from `expected`.
std::string FirstDivergence(const std::string& expected, const std::string& actual);

// Synthesizes every step, runs segment -> gate -> classify -> smooth ->
// route -> mock recognize -> merge -> command engine, and compares the
// final document byte for byte.
SessionReport RunSession(const SessionScript& script, const ClassifierModel& model,
                         double gate_db = kDefaultGateDb,
                         const CommandEngine& engine_prototype = CommandEngine());

// Incremental variant driven one step at a time (console inject_step).
class LiveSession {
 public:
  LiveSession(const ClassifierModel& model, double gate_db, std::uint64_t seed,
              EventLog& log, CommandEngine engine = CommandEngine());

  // Synthesizes the step framed by silence and pushes it through the
  // pipeline; returns the step's report.
  StepReport InjectStep(const SessionStep& step);

  const CommandEngine& engine() const { return engine_; }
  std::uint64_t packets() const { return next_packet_; }

 private:
  const ClassifierModel& model_;
  double gate_db_;
  std::uint64_t seed_;
  std::uint64_t steps_ = 0;
  std::uint64_t next_packet_ = 0;
  EventLog& log_;
  CommandEngine engine_;
};

}  // namespace dualvoice

#endif  // DUALVOICE_SESSION_H_
