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

#include "dualvoice/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dualvoice/error.h"
#include "dualvoice/mfcc.h"

namespace dualvoice {
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestHeader =
    "id,mode,text,seed,duration_s,f0_hz,split,file";

std::string WavName(std::uint64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "u%05llu.wav", static_cast<unsigned long long>(id));
  return buf;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

const std::vector<std::string>& CorpusPhrases() {
  static const std::vector<std::string> kPhrases = [] {
    std::vector<std::string> p = {"one", "two", "three", "four", "five",
                                  "six", "seven", "eight", "nine", "zero"};
    for (char c = 'a'; c <= 'z'; ++c) p.emplace_back(1, c);
    for (const char* s :
         {"newline", "back", "delete", "delete sentence", "space", "equal",
          "at", "number", "dollar", "ampersand", "asterisk",
          "left parenthesis", "right parenthesis", "left bracket",
          "right bracket", "underline", "hyphen", "plus", "minus", "percent",
          "atmark", "sharp", "spell", "paragraph", "period", "comma", "dot",
          "menu", "open", "close", "yes", "no", "line", "new", "repeat",
          "candidates", "next", "page", "word", "delete line", "delete word",
          "question mark", "exclamation mark", "quote", "double quote"}) {
      p.emplace_back(s);
    }
    return p;
  }();
  return kPhrases;
}

Corpus GenerateCorpus(int n_per_class, std::uint64_t seed) {
  if (n_per_class < 1) {
    throw Error(ErrorCode::kInvalidArgument, "corpus: n must be >= 1");
  }
  const auto& phrases = CorpusPhrases();
  Corpus corpus;
  corpus.seed = seed;
  const std::size_t n = static_cast<std::size_t>(n_per_class);
  corpus.utterances.reserve(2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const Label mode = i < n ? Label::kNormal : Label::kWhisper;
    const std::size_t k = i % n;
    const std::string& text = phrases[(k / kPhraseRepeats) % phrases.size()];
    std::mt19937_64 rng(seed + i);
    const double duration =
        std::round(std::uniform_real_distribution<double>(
                       kMinUtteranceSeconds, kMaxUtteranceSeconds)(rng) *
                   kSampleRate) /
        kSampleRate;
    CorpusUtterance u;
    u.id = i;
    u.spec = RandomUtteranceSpec(mode, text, duration, rng());
    u.samples = GenerateUtterance(u.spec);
    corpus.utterances.push_back(std::move(u));
  }

  std::mt19937_64 rng(seed);
  for (Label mode : {Label::kNormal, Label::kWhisper}) {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
      if (corpus.utterances[i].spec.mode == mode) ids.push_back(i);
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto held = static_cast<std::size_t>(
        std::llround(kHeldOutFraction * static_cast<double>(ids.size())));
    for (std::size_t j = 0; j < held; ++j) corpus.utterances[ids[j]].held_out = true;
  }
  std::shuffle(corpus.utterances.begin(), corpus.utterances.end(), rng);
  return corpus;
}

void WriteCorpus(const Corpus& corpus, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "wav", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  std::ofstream manifest(fs::path(dir) / "manifest.csv");
  if (!manifest) throw Error(ErrorCode::kIo, "cannot write manifest in " + dir);
  manifest << kManifestHeader << '\n';
  for (const auto& u : corpus.utterances) {
    const std::string file = "wav/" + WavName(u.id);
    WriteWav((fs::path(dir) / file).string(), u.samples);
    char num[64];
    manifest << u.id << ',' << LabelName(u.spec.mode) << ',' << u.spec.text << ','
             << u.spec.seed << ',';
    std::snprintf(num, sizeof(num), "%.6f,%.6f", u.spec.duration_s,
                  u.spec.mode == Label::kNormal ? u.spec.f0_hz : 0.0);
    manifest << num << ',' << (u.held_out ? "test" : "train") << ',' << file << '\n';
  }
  if (!manifest) throw Error(ErrorCode::kIo, "failed writing manifest in " + dir);
}

Corpus ReadCorpus(const std::string& dir) {
  std::ifstream manifest(fs::path(dir) / "manifest.csv");
  if (!manifest) throw Error(ErrorCode::kIo, "no manifest.csv in " + dir);
  std::string line;
  if (!std::getline(manifest, line) || line != kManifestHeader) {
    throw Error(ErrorCode::kFormat, "manifest.csv: unexpected header");
  }
  Corpus corpus;
  int line_no = 1;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = SplitCsv(line);
    if (cells.size() != 8) {
      throw Error(ErrorCode::kFormat,
                  "manifest.csv line " + std::to_string(line_no) + ": expected 8 fields");
    }
    CorpusUtterance u;
    try {
      u.id = std::stoull(cells[0]);
      u.spec.seed = std::stoull(cells[3]);
      u.spec.duration_s = std::stod(cells[4]);
      u.spec.f0_hz = std::stod(cells[5]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kFormat,
                  "manifest.csv line " + std::to_string(line_no) + ": bad number");
    }
    if (cells[1] == "normal") {
      u.spec.mode = Label::kNormal;
    } else if (cells[1] == "whisper") {
      u.spec.mode = Label::kWhisper;
    } else {
      throw Error(ErrorCode::kFormat,
                  "manifest.csv line " + std::to_string(line_no) + ": bad mode " + cells[1]);
    }
    u.spec.text = cells[2];
    u.spec.level_dbfs = DefaultLevelDbfs(u.spec.mode);
    u.held_out = cells[6] == "test";
    auto wav = ReadWav((fs::path(dir) / cells[7]).string());
    u.samples = std::move(wav.samples);
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

CorpusExamples BuildExamples(const Corpus& corpus, double gate_db) {
  CorpusExamples out;
  const auto& mfcc = MfccExtractor::Default();
  for (const auto& u : corpus.utterances) {
    auto seg = SegmentStream(u.samples);
    for (const auto& s : seg.segments) {
      if (Gate(s, gate_db)) {
        ++out.gated_segments;
        continue;
      }
      Example ex;
      ex.samples.assign(s.samples.begin(), s.samples.end());
      ex.features = mfcc.Compute(ex.samples);
      ex.label = u.spec.mode == Label::kWhisper ? 1 : 0;
      ex.utterance = u.id;
      (u.held_out ? out.held_out : out.train).push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<Example> CarveValidation(std::vector<Example>& train, std::uint64_t stride) {
  if (stride < 2) throw Error(ErrorCode::kInvalidArgument, "validation stride must be >= 2");
  std::vector<Example> validation;
  std::vector<Example> kept;
  for (auto& ex : train) {
    (ex.utterance % stride == 0 ? validation : kept).push_back(std::move(ex));
  }
  train = std::move(kept);
  return validation;
}

CorpusTrainResult TrainOnCorpus(const Corpus& corpus, ClassifierModel init,
                                const TrainConfig& config, double gate_db,
                                const EpochCallback& on_epoch) {
  auto examples = BuildExamples(corpus, gate_db);
  auto validation = CarveValidation(examples.train);
  CorpusTrainResult r;
  r.train_examples = examples.train.size();
  r.validation_examples = validation.size();
  r.held_out_examples = examples.held_out.size();
  r.gated_segments = examples.gated_segments;
  r.training = Train(std::move(init), examples.train, validation, config, on_epoch);
  r.held_out_accuracy = Accuracy(r.training.model, examples.held_out);
  return r;
}

}  // namespace dualvoice
