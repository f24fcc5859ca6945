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

// Acceptance run: one PASS/FAIL line per engine criterion. Tolerances and
// workload sizes are fixed below; the exit status is nonzero when any gated
// criterion fails. The front-end comparison is printed but never gates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dualvoice/audio_io.h"
#include "dualvoice/classifier.h"
#include "dualvoice/classifier_model.h"
#include "dualvoice/conv_stack.h"
#include "dualvoice/corpus.h"
#include "dualvoice/discriminator_service.h"
#include "dualvoice/metrics.h"
#include "dualvoice/router.h"
#include "dualvoice/session.h"
#include "dualvoice/synth.h"
#include "dualvoice/trainer.h"
#include "dualvoice/wire.h"
#include "test_util.h"

namespace dualvoice {
namespace {

using Clock = std::chrono::steady_clock;
using namespace std::chrono_literals;

// Pinned thresholds.
constexpr int kCorpusPerClass = 500;
constexpr std::uint64_t kCorpusSeed = 7;
constexpr double kMinHeldOutAccuracy = 0.95;
constexpr double kMaxTrainSeconds = 300.0;
constexpr double kFrontendSlack = 0.02;
// A 64-channel conv epoch costs close to a minute on one core, so the
// comparison run stops after this many epochs.
constexpr int kConvEpochCap = 3;
constexpr double kMfccGradTolerance = 1e-4;
constexpr double kConvGradTolerance = 1e-3;
constexpr int kGradSeeds = 5;
constexpr int kComplementTrials = 1000;
constexpr std::size_t kMaxSequenceLength = 200;
constexpr std::size_t kMaxConvInput = 48000;
constexpr int kMetricPairs = 500;
constexpr double kMaxSessionSeconds = 30.0;
constexpr double kMinPacketsPerSecond = 100.0;

int failures = 0;

void Report(const std::string& name, bool pass, const std::string& detail, bool gated = true) {
  std::printf("%s  %-28s %s%s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
              gated ? "" : " [reported, not gated]");
  std::fflush(stdout);
  if (!pass && gated) ++failures;
}

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// --- classifier accuracy and front-end comparison -------------------------

ClassifierModel CheckAccuracy(const Corpus& corpus) {
  TrainConfig config;
  const auto start = Clock::now();
  auto result = TrainOnCorpus(corpus, ClassifierModel::CreateMfcc(kCorpusSeed), config);
  const double secs = Seconds(start);
  Report("classifier_accuracy_mfcc",
         result.held_out_accuracy >= kMinHeldOutAccuracy && secs <= kMaxTrainSeconds,
         Fmt("held-out %.4f (>= %.2f), %.1f s (<= 300 s)", result.held_out_accuracy,
             kMinHeldOutAccuracy, secs));
  return std::move(result.training.model);
}

void CheckFrontendComparison(const Corpus& corpus, double mfcc_accuracy) {
  TrainConfig config;
  config.max_epochs = kConvEpochCap;
  const auto start = Clock::now();
  auto result = TrainOnCorpus(corpus, ClassifierModel::CreateConv(kCorpusSeed), config);
  const double secs = Seconds(start);
  Report("frontend_conv_vs_mfcc", result.held_out_accuracy >= mfcc_accuracy - kFrontendSlack,
         Fmt("conv %.4f vs mfcc %.4f - 0.02, %.0f s", result.held_out_accuracy, mfcc_accuracy,
             secs) + " (" + std::to_string(kConvEpochCap) + " epochs max)",
         /*gated=*/false);
}

// --- gradients --------------------------------------------------------------

std::vector<Example> GradBatch(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Example> batch;
  for (int label = 0; label < 2; ++label) {
    auto spec = RandomUtteranceSpec(label == 0 ? Label::kNormal : Label::kWhisper, "check", 0.3,
                                    seed * 10 + static_cast<std::uint64_t>(label));
    auto audio = GenerateUtterance(spec);
    const std::size_t offset = (rng() % 4) * 400;
    Example ex;
    ex.samples.assign(audio.begin() + static_cast<std::ptrdiff_t>(offset),
                      audio.begin() + static_cast<std::ptrdiff_t>(offset + kPacketSamples));
    ex.label = label;
    batch.push_back(std::move(ex));
  }
  return batch;
}

void CheckGradients() {
  double worst_mfcc = 0.0, worst_conv = 0.0;
  std::size_t checked_mfcc = 0, checked_conv = 0;
  for (int s = 0; s < kGradSeeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(100 + s);
    auto batch = GradBatch(seed);

    auto mfcc = ClassifierModel::CreateMfcc(seed);
    for (auto& ex : batch) ex.features = ComputeFrontend(mfcc, ex.samples);
    auto r = GradCheck(mfcc, batch);
    worst_mfcc = std::max(worst_mfcc, r.max_relative_error);
    checked_mfcc += r.checked;

    for (auto& ex : batch) ex.features = {};
    auto conv = ClassifierModel::CreateConv(seed);
    GradCheckOptions opts;
    opts.max_per_tensor = 48;
    auto rc = GradCheck(conv, batch, opts);
    worst_conv = std::max(worst_conv, rc.max_relative_error);
    checked_conv += rc.checked;
  }
  Report("grad_check_mfcc_head", worst_mfcc < kMfccGradTolerance,
         Fmt("max rel err %.3g (< 1e-4), %.0f params over 5 seeds", worst_mfcc,
             static_cast<double>(checked_mfcc)));
  Report("grad_check_conv_joint", worst_conv < kConvGradTolerance,
         Fmt("max rel err %.3g (< 1e-3), %.0f sampled params over 5 seeds", worst_conv,
             static_cast<double>(checked_conv)));
}

// --- routing -----------------------------------------------------------------

void CheckComplementarity() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> amp(0.0, 0.6);
  std::size_t packets = 0, mismatches = 0, gated = 0;
  for (int trial = 0; trial < kComplementTrials; ++trial) {
    const std::size_t len = rng() % (kMaxSequenceLength + 1);
    std::vector<AudioSegment> segs(len);
    std::vector<SegmentLabel> raw(len);
    for (std::size_t i = 0; i < len; ++i) {
      segs[i].index = i;
      // Roughly a third of packets sit far below the gate.
      const double a = rng() % 3 == 0 ? 1e-3 : amp(rng) + 0.05;
      std::uniform_real_distribution<double> u(-a, a);
      for (auto& v : segs[i].samples) v = u(rng);
      if (auto g = Gate(segs[i])) {
        raw[i] = *g;
      } else {
        raw[i] = {rng() % 2 ? Label::kWhisper : Label::kNormal, 0.6};
      }
    }
    auto smoothed = SmoothLabels(raw);
    std::vector<LabeledSegment> labeled(len);
    for (std::size_t i = 0; i < len; ++i) labeled[i] = {segs[i], raw[i], smoothed[i]};
    auto routed = Route(labeled);
    auto normal = Flatten(routed.normal);
    auto whisper = Flatten(routed.whisper);
    if (normal.size() != len * kPacketSamples || whisper.size() != normal.size()) {
      ++mismatches;
      continue;
    }
    for (std::size_t i = 0; i < len; ++i) {
      ++packets;
      const bool silent = raw[i].kind == Label::kSilence;
      gated += silent;
      for (std::size_t t = 0; t < kPacketSamples; ++t) {
        const double gated_input = silent ? 0.0 : segs[i].samples[t];
        if (normal[i * kPacketSamples + t] + whisper[i * kPacketSamples + t] != gated_input) {
          ++mismatches;
          break;
        }
      }
    }
  }
  Report("stream_complementarity", mismatches == 0,
         Fmt("%.0f packets (%.0f gated), %.0f mismatching", static_cast<double>(packets),
             static_cast<double>(gated), static_cast<double>(mismatches)));
}

// --- conv geometry -----------------------------------------------------------

void CheckConvGeometry() {
  const auto spec = ConvStackSpec::DeskScale();
  std::size_t bad = 0;
  for (std::size_t n = 0; n <= kMaxConvInput; ++n) {
    // Valid (unpadded) convolution, block by block.
    std::size_t len = n;
    for (const auto& b : spec.blocks) {
      const auto k = static_cast<std::size_t>(b.kernel);
      len = len < k ? 0 : (len - k) / static_cast<std::size_t>(b.stride) + 1;
    }
    if (FrameCount(n, spec) != len) ++bad;
  }
  // A spot check through the real extractor at the reference length.
  std::vector<double> second = testing::Sine(16000, 220.0, 0.3);
  auto small = ConvStackSpec::WithChannels(4);
  std::vector<double> w(small.weight_count(), 0.01);
  const std::size_t emitted = ConvExtract(second, small, w).frame_count();
  Report("conv_geometry", bad == 0 && FrameCount(16000, spec) == 49 && emitted == 49,
         Fmt("0..48000 mismatches %.0f, 16000 samples -> %.0f frames (extractor %.0f)",
             static_cast<double>(bad), static_cast<double>(FrameCount(16000, spec)),
             static_cast<double>(emitted)));
}

// --- metrics -----------------------------------------------------------------

// Plain recursion with memoization over the edit lattice.
std::size_t OracleDistance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<long(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> long {
    if (i == 0) return static_cast<long>(j);
    if (j == 0) return static_cast<long>(i);
    long& m = memo[i][j];
    if (m >= 0) return m;
    m = std::min({d(i - 1, j) + 1, d(i, j - 1) + 1,
                  d(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return m;
  };
  return static_cast<std::size_t>(d(a.size(), b.size()));
}

double OracleRate(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  if (ref.empty()) return hyp.empty() ? 0.0 : 1.0;
  return static_cast<double>(OracleDistance(ref, hyp)) / static_cast<double>(ref.size());
}

void CheckMetrics() {
  static const char* kVocab[] = {"a", "to", "the", "menu", "two", "fun", "is", "hello", "world"};
  std::mt19937_64 rng(55);
  auto sentence = [&] {
    std::string s;
    const std::size_t words = rng() % 9;
    for (std::size_t w = 0; w < words; ++w) {
      if (w) s += ' ';
      s += kVocab[rng() % std::size(kVocab)];
    }
    return s;
  };
  int disagreements = 0;
  for (int i = 0; i < kMetricPairs; ++i) {
    const std::string ref = sentence(), hyp = sentence();
    if (Wer(ref, hyp) != OracleRate(Words(ref), Words(hyp))) ++disagreements;
    if (Cer(ref, hyp) != OracleRate(Characters(ref), Characters(hyp))) ++disagreements;
  }
  const double fixed = Wer("hello world is fun", "hello word is fun");
  Report("wer_cer_oracle", disagreements == 0 && fixed == 0.25,
         Fmt("%.0f disagreements over 500 pairs, substitution example %.4f (== 0.25)",
             disagreements, fixed));
}

// --- sessions and throughput -------------------------------------------------

void CheckSessions(const ClassifierModel& model) {
  const char* kScripts[] = {"menu_correction", "symbol_entry", "spell", "emoji"};
  double total = 0.0;
  int passed = 0;
  std::string detail;
  for (const char* name : kScripts) {
    auto script =
        LoadSessionScript(testing::SourcePath(std::string("data/sessions/") + name + ".json"));
    const auto start = Clock::now();
    auto report = RunSession(script, model);
    total += Seconds(start);
    passed += report.pass;
    detail += std::string(name) + (report.pass ? " ok" : " FAILED: " + report.diff) + "; ";
  }
  Report("end_to_end_sessions", passed == 4 && total < kMaxSessionSeconds,
         detail + Fmt("total %.2f s (< 30 s)", total));
}

void CheckThroughput(const ClassifierModel& model) {
  auto script = LoadSessionScript(testing::SourcePath("data/sessions/menu_correction.json"));
  auto audio = RenderSessionAudio(script);
  // Several passes so the timing is not dominated by setup.
  std::size_t packets = 0;
  const auto start = Clock::now();
  for (int pass = 0; pass < 5; ++pass) {
    StreamRouter router(model, kDefaultGateDb);
    for (std::size_t off = 0; off < audio.size(); off += 512) {
      const std::size_t n = std::min<std::size_t>(512, audio.size() - off);
      packets += router.Push(std::span(audio).subspan(off, n)).labeled.size();
    }
    packets += router.Flush().labeled.size();
  }
  const double secs = Seconds(start);
  const double rate = static_cast<double>(packets) / secs;
  Report("pipeline_throughput", rate >= kMinPacketsPerSecond,
         Fmt("%.0f packets/s (>= 100), %.1fx real time", rate, rate / 10.0));
}

// --- wire protocol -----------------------------------------------------------

void CheckWire() {
  auto model = ClassifierModel::CreateMfcc(1);
  for (std::size_t i = model.fc2_w_offset(); i < model.conv_offset(); ++i) model.params()[i] = 0.0;
  DiscriminatorServer server(std::move(model), kDefaultGateDb);
  server.Start("127.0.0.1", 0);
  const char* kCases[] = {"silence",  "quiet_tone", "tie_normal", "pipelined",
                          "bad_length", "bad_type", "oversized",  "good_then_bad"};
  const char* kClosing[] = {"bad_length", "bad_type", "oversized", "good_then_bad"};
  int matched = 0, closed_ok = 0;
  std::string failed;
  for (const char* name : kCases) {
    const std::string base = testing::SourcePath("tests/golden/") + name;
    const auto request = testing::ReadBytes(base + ".request.bin");
    const auto expected = testing::ReadBytes(base + ".reply.bin");
    auto sock = ConnectTcp("127.0.0.1", server.port());
    WriteAll(sock, request);
    std::vector<std::uint8_t> got;
    std::uint8_t byte;
    ReadStatus st;
    for (;;) {
      st = ReadExact(sock, std::span(&byte, 1), got.size() >= expected.size() ? 300ms : 5000ms);
      if (st != ReadStatus::kOk) break;
      got.push_back(byte);
    }
    const bool closing = std::find_if(std::begin(kClosing), std::end(kClosing), [&](const char* c) {
                           return std::string(c) == name;
                         }) != std::end(kClosing);
    const bool ok = !expected.empty() && got == expected;
    matched += ok;
    if (closing) {
      // Malformed input ends in an ERROR frame followed by a close.
      // Walk the reply frames; the last one must be ERROR.
      std::size_t pos = 0, last_type_at = 0;
      while (pos + kFrameHeaderSize <= got.size()) {
        last_type_at = pos + 4;
        const std::size_t len = (std::size_t{got[pos]} << 24) | (std::size_t{got[pos + 1]} << 16) |
                                (std::size_t{got[pos + 2]} << 8) | got[pos + 3];
        pos += kFrameHeaderSize + len;
      }
      const bool err = ok && pos == got.size() && !got.empty() &&
                       got[last_type_at] == static_cast<std::uint8_t>(MessageType::kError);
      const bool closed = err && st == ReadStatus::kClosed;
      closed_ok += closed;
      if (!closed) failed += std::string(" ") + name + "(no close)";
    }
    if (!ok) failed += std::string(" ") + name;
  }
  server.Stop();
  Report("wire_protocol_conformance", matched == 8 && closed_ok == 4,
         Fmt("%.0f/8 golden replies byte-exact, %.0f/4 malformed cases closed", matched,
             closed_ok) + (failed.empty() ? "" : ", failing:" + failed));
}

// With an argument, only the groups whose name contains it run.
int Run(const std::string& only) {
  auto want = [&](const char* group) {
    return only.empty() || std::string(group).find(only) != std::string::npos;
  };
  std::printf("acceptance: corpus n=%d/class seed %llu\n", kCorpusPerClass,
              static_cast<unsigned long long>(kCorpusSeed));
  if (want("geometry")) CheckConvGeometry();
  if (want("metrics")) CheckMetrics();
  if (want("complementarity")) CheckComplementarity();
  if (want("wire")) CheckWire();
  if (want("grad")) CheckGradients();
  if (want("corpus")) {
    const auto corpus = GenerateCorpus(kCorpusPerClass, kCorpusSeed);
    auto model = CheckAccuracy(corpus);
    CheckSessions(model);
    CheckThroughput(model);
    const auto examples = BuildExamples(corpus);
    CheckFrontendComparison(corpus, Accuracy(model, examples.held_out));
  }
  std::printf("%s (%d gated failure%s)\n", failures == 0 ? "ALL PASS" : "SOME FAILED", failures,
              failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace dualvoice

int main(int argc, char** argv) {
  try {
    return dualvoice::Run(argc > 1 ? argv[1] : "");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
    return 2;
  }
}
