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

#include "dualvoice/session.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dualvoice/error.h"
#include "dualvoice/synth.h"
#include <nlohmann/json.hpp>

namespace dualvoice {
namespace {

using json = nlohmann::json;

SessionStep ParseStep(const json& j, std::size_t i) {
  const std::string where = "step " + std::to_string(i);
  SessionStep step;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "normal") {
    step.mode = Label::kNormal;
  } else if (mode == "whisper") {
    step.mode = Label::kWhisper;
  } else {
    throw Error(ErrorCode::kConfig, where + ": mode must be normal or whisper");
  }
  step.text = j.at("text").get<std::string>();
  if (step.text.empty()) throw Error(ErrorCode::kConfig, where + ": empty text");
  if (j.contains("recognized")) step.recognized = j.at("recognized").get<std::string>();
  if (j.contains("alternatives")) {
    step.alternatives = j.at("alternatives").get<std::vector<std::string>>();
  }
  step.inject_rank = j.value("inject_rank", 0);
  if (step.recognized && step.inject_rank < 2) {
    throw Error(ErrorCode::kConfig, where + ": recognized requires inject_rank >= 2");
  }
  return step;
}

struct PipelineResult {
  std::vector<LabeledSegment> labeled;
  std::vector<TranscriptEvent> events;
  std::vector<UtteranceSpan> unrecognized;
};

PipelineResult RunPipeline(std::span<const double> samples, const ClassifierModel& model,
                           double gate_db, const UtteranceLedger& ledger) {
  PipelineResult r;
  StreamRouter router(model, gate_db);
  RoutedStreams streams;
  auto take = [&](StreamRouter::Output&& out) {
    r.labeled.insert(r.labeled.end(), out.labeled.begin(), out.labeled.end());
    streams.normal.insert(streams.normal.end(), out.routed.normal.begin(),
                          out.routed.normal.end());
    streams.whisper.insert(streams.whisper.end(), out.routed.whisper.begin(),
                           out.routed.whisper.end());
  };
  // Feed packet-sized chunks as a capture device would.
  for (std::size_t pos = 0; pos < samples.size(); pos += kPacketSamples) {
    take(router.Push(samples.subspan(pos, std::min<std::size_t>(kPacketSamples,
                                                                 samples.size() - pos))));
  }
  take(router.Flush());

  MockRecognizer mock(ledger);
  auto normal = RecognizeChannel(Channel::kNormalStream, streams.normal, mock);
  auto whisper = RecognizeChannel(Channel::kWhisperStream, streams.whisper, mock);
  r.events = MergeEvents(normal.events, whisper.events);
  r.unrecognized = normal.unrecognized;
  r.unrecognized.insert(r.unrecognized.end(), whisper.unrecognized.begin(),
                        whisper.unrecognized.end());
  return r;
}

std::vector<double> StepAudio(const SessionStep& step, std::uint64_t seed) {
  const double seconds = StepPacketCount(step) * kPacketSamples / double(kSampleRate);
  return GenerateUtterance(RandomUtteranceSpec(step.mode, step.text, seconds, seed));
}

LedgerEntry EntryFor(const SessionStep& step, std::uint64_t first, std::uint64_t last) {
  LedgerEntry e;
  e.mode = step.mode;
  e.text = step.text;
  e.recognized = step.recognized;
  e.alternatives = step.alternatives;
  e.inject_rank = step.inject_rank;
  e.first_packet = first;
  e.last_packet = last;
  return e;
}

void AppendSilence(std::vector<double>& audio, int packets) {
  audio.insert(audio.end(), static_cast<std::size_t>(packets) * kPacketSamples, 0.0);
}

void FillStepLabels(StepReport& report, const std::vector<LabeledSegment>& labeled,
                    std::uint64_t offset) {
  for (const auto& ls : labeled) {
    const std::uint64_t idx = ls.segment.index + offset;
    if (idx < report.first_packet || idx > report.last_packet) continue;
    report.labels.push_back(ls.smoothed.kind);
    if (ls.smoothed.kind == report.mode) ++report.correct;
  }
}

}  // namespace

SessionScript ParseSessionScript(const std::string& text) {
  SessionScript s;
  try {
    const json j = json::parse(text);
    s.name = j.value("name", std::string());
    s.seed = j.value("seed", std::uint64_t{0});
    s.expected = j.at("expected").get<std::string>();
    const auto& steps = j.at("steps");
    if (!steps.is_array() || steps.empty()) {
      throw Error(ErrorCode::kConfig, "session script needs at least one step");
    }
    for (std::size_t i = 0; i < steps.size(); ++i) s.steps.push_back(ParseStep(steps[i], i));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("session script: ") + e.what());
  }
  return s;
}

SessionScript LoadSessionScript(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseSessionScript(ss.str());
}

int StepPacketCount(const SessionStep& step) {
  const auto words = static_cast<int>(std::count(step.text.begin(), step.text.end(), ' ')) + 1;
  return std::clamp(kMinStepPackets + 2 * (words - 1), kMinStepPackets, kMaxStepPackets);
}

std::string FirstDivergence(const std::string& expected, const std::string& actual) {
  if (expected == actual) return "";
  std::size_t i = 0;
  while (i < expected.size() && i < actual.size() && expected[i] == actual[i]) ++i;
  const std::size_t from = i > 16 ? i - 16 : 0;
  auto quote = [](const std::string& s) {
    json j = s;
    return j.dump();
  };
  std::ostringstream out;
  out << "first divergence at byte " << i << ": expected "
      << quote(expected.substr(from, i - from + 16)) << ", got "
      << quote(actual.substr(from, i - from + 16));
  return out.str();
}

std::vector<double> RenderSessionAudio(const SessionScript& script,
                                       UtteranceLedger* ledger,
                                       std::vector<StepReport>* steps) {
  std::vector<double> audio;
  AppendSilence(audio, kLeadSilencePackets);
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const auto& step = script.steps[i];
    const auto first = audio.size() / kPacketSamples;
    auto clip = StepAudio(step, script.seed + i);
    audio.insert(audio.end(), clip.begin(), clip.end());
    const auto last = audio.size() / kPacketSamples - 1;
    if (ledger) ledger->Add(EntryFor(step, first, last));
    if (steps) {
      StepReport sr;
      sr.mode = step.mode;
      sr.text = step.text;
      sr.first_packet = first;
      sr.last_packet = last;
      steps->push_back(std::move(sr));
    }
    AppendSilence(audio, kGapPackets);
  }
  return audio;
}

SessionReport RunSession(const SessionScript& script, const ClassifierModel& model,
                         double gate_db, const CommandEngine& engine_prototype) {
  if (script.steps.empty()) throw Error(ErrorCode::kConfig, "session script has no steps");
  SessionReport report;
  report.name = script.name;
  report.expected = script.expected;

  UtteranceLedger ledger;
  const auto audio = RenderSessionAudio(script, &ledger, &report.steps);

  auto result = RunPipeline(audio, model, gate_db, ledger);
  EventLog log;
  for (const auto& ls : result.labeled) {
    log.Append(EventKind::kLabel, LabelPayload(ls.segment.index, ls.raw, ls.smoothed));
  }
  CommandEngine engine = engine_prototype;
  log.Append(EventKind::kEditorState, EditorStatePayload(engine.state()));
  for (const auto& ev : result.events) {
    auto outcome = ApplyAndLog(engine, ev, log);
    report.warnings.insert(report.warnings.end(), outcome.warnings.begin(),
                           outcome.warnings.end());
  }

  std::size_t packets = 0, correct = 0;
  for (auto& sr : report.steps) {
    FillStepLabels(sr, result.labeled, 0);
    packets += sr.labels.size();
    correct += sr.correct;
  }
  report.accuracy = packets ? static_cast<double>(correct) / packets : 0.0;
  report.unrecognized = std::move(result.unrecognized);
  report.document = engine.text();
  report.diff = FirstDivergence(script.expected, report.document);
  report.pass = report.diff.empty();
  report.event_log = log.lines();
  return report;
}

LiveSession::LiveSession(const ClassifierModel& model, double gate_db,
                         std::uint64_t seed, EventLog& log, CommandEngine engine)
    : model_(model), gate_db_(gate_db), seed_(seed), log_(log),
      engine_(std::move(engine)) {}

StepReport LiveSession::InjectStep(const SessionStep& step) {
  std::vector<double> audio;
  AppendSilence(audio, 1);
  const auto first = audio.size() / kPacketSamples;
  auto clip = StepAudio(step, seed_ + steps_++);
  audio.insert(audio.end(), clip.begin(), clip.end());
  const auto last = audio.size() / kPacketSamples - 1;
  AppendSilence(audio, kGapPackets);

  UtteranceLedger ledger;
  ledger.Add(EntryFor(step, first, last));
  auto result = RunPipeline(audio, model_, gate_db_, ledger);

  const std::uint64_t offset = next_packet_;
  for (const auto& ls : result.labeled) {
    log_.Append(EventKind::kLabel,
                LabelPayload(ls.segment.index + offset, ls.raw, ls.smoothed));
  }
  for (auto ev : result.events) {
    ev.t_start += offset;
    ev.t_end += offset;
    ApplyAndLog(engine_, ev, log_);
  }
  next_packet_ += audio.size() / kPacketSamples;

  StepReport report;
  report.mode = step.mode;
  report.text = step.text;
  report.first_packet = first + offset;
  report.last_packet = last + offset;
  FillStepLabels(report, result.labeled, offset);
  return report;
}

}  // namespace dualvoice
