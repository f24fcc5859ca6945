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

#ifndef DUALVOICE_CORPUS_H_
#define DUALVOICE_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dualvoice/classifier.h"
#include "dualvoice/synth.h"
#include "dualvoice/trainer.h"

namespace dualvoice {

// The whispered command vocabulary used for per-user data collection.
const std::vector<std::string>& CorpusPhrases();

inline constexpr int kPhraseRepeats = 5;
inline constexpr double kHeldOutFraction = 0.2;
inline constexpr double kMinUtteranceSeconds = 0.3;
inline constexpr double kMaxUtteranceSeconds = 0.7;

struct CorpusUtterance {
  std::uint64_t id = 0;
  SyntheticUtteranceSpec spec;
  bool held_out = false;
  std::vector<double> samples;
};

struct Corpus {
  std::uint64_t seed = 0;
  std::vector<CorpusUtterance> utterances;  // presentation order (shuffled)
};

// n utterances per class. Each class walks the phrase list with every
// phrase repeated kPhraseRepeats times; utterance i is synthesized from
// seed + i. The held-out split takes kHeldOutFraction of each class.
Corpus GenerateCorpus(int n_per_class, std::uint64_t seed);

// Directory layout: manifest.csv plus wav/<id>.wav.
void WriteCorpus(const Corpus& corpus, const std::string& dir);
Corpus ReadCorpus(const std::string& dir);

struct CorpusExamples {
  std::vector<Example> train;
  std::vector<Example> held_out;
  std::size_t gated_segments = 0;  // excluded by the power gate
};

// Cuts every utterance into packets, drops gated ones, and precomputes MFCC
// features (conv models recompute from samples).
CorpusExamples BuildExamples(const Corpus& corpus, double gate_db = kDefaultGateDb);

// Moves every `stride`-th utterance's examples out of `train` so early
// stopping never looks at the held-out split.
std::vector<Example> CarveValidation(std::vector<Example>& train, std::uint64_t stride = 8);

struct CorpusTrainResult {
  TrainResult training;
  double held_out_accuracy = 0.0;
  std::size_t train_examples = 0;
  std::size_t validation_examples = 0;
  std::size_t held_out_examples = 0;
  std::size_t gated_segments = 0;
};

// Builds examples, carves validation out of the training split, trains
// `init`, and scores the held-out split once at the end.
CorpusTrainResult TrainOnCorpus(const Corpus& corpus, ClassifierModel init,
                                const TrainConfig& config, double gate_db = kDefaultGateDb,
                                const EpochCallback& on_epoch = {});

}  // namespace dualvoice

#endif  // DUALVOICE_CORPUS_H_
