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

#ifndef DUALVOICE_CLASSIFIER_H_
#define DUALVOICE_CLASSIFIER_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dualvoice/audio_io.h"
#include "dualvoice/classifier_model.h"
#include "dualvoice/features.h"

namespace dualvoice {

inline constexpr double kLayerNormEps = 1e-9;

// One training/evaluation item. `samples` feeds the conv frontend; MFCC
// models read `features`, which may also be injected directly.
struct Example {
  std::vector<double> samples;
  FeatureSequence features;
  int label = 0;  // 0 = normal, 1 = whisper
  std::uint64_t utterance = 0;
};

struct HeadOutput {
  std::array<double, kClassCount> logits{};
  std::array<double, kClassCount> probs{};
  std::vector<double> hidden;  // post-ReLU, the input to the last FC
};

// Per-frame LayerNorm without gamma/beta: zero mean, unit variance.
std::vector<double> NormalizeFrame(std::span<const double> frame);

FeatureSequence ComputeFrontend(const ClassifierModel& model,
                                std::span<const double> samples);

// Features for an example, computing them from samples when required.
FeatureSequence ExampleFeatures(const ClassifierModel& model,
                                const Example& example);

HeadOutput EvaluateHead(const ClassifierModel& model,
                        const FeatureSequence& features);

// argmax of the softmax; an exact tie resolves to Normal.
SegmentLabel LabelFromProbs(const std::array<double, kClassCount>& probs);

// Gate is not applied here; callers classify segments that passed it.
SegmentLabel Classify(const AudioSegment& seg, const ClassifierModel& model);

// Cross-entropy of one example; adds its gradient into `grad` (same layout
// as model.params()) unless grad is empty.
double ExampleLossAndGradient(const ClassifierModel& model,
                              const Example& example, std::span<double> grad);

// Mean loss over the batch; grad receives the mean gradient.
double BatchLossAndGradient(const ClassifierModel& model,
                            std::span<const Example* const> batch,
                            std::span<double> grad);

double Accuracy(const ClassifierModel& model, std::span<const Example> data);

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;  // mean cross-entropy
};
Evaluation Evaluate(const ClassifierModel& model, std::span<const Example> data);

// CSV: header "label,h0,...", one row per example with the hidden vector.
void ExportFeatures(const ClassifierModel& model, std::span<const Example> data,
                    std::ostream& out);

}  // namespace dualvoice

#endif  // DUALVOICE_CLASSIFIER_H_
