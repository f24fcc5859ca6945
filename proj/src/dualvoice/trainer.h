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

#ifndef DUALVOICE_TRAINER_H_
#define DUALVOICE_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dualvoice/classifier.h"
#include "dualvoice/classifier_model.h"

namespace dualvoice {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 64;
  int max_epochs = 50;
  // Epochs without a validation-accuracy improvement before stopping.
  int patience = 5;
  std::uint64_t seed = 7;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;
  double validation_loss = 0.0;
};

struct TrainResult {
  ClassifierModel model;  // best validation epoch, rounded to float
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_validation_accuracy = 0.0;
};

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, const TrainConfig& config);
  void Step(std::span<double> params, std::span<const double> grad);
  long steps() const { return t_; }

 private:
  TrainConfig config_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

// Steps Adam on caller-chosen batches.
class Trainer {
 public:
  Trainer(ClassifierModel model, const TrainConfig& config);

  // One Adam update; returns the batch loss measured before the update.
  double Step(std::span<const Example* const> batch);

  const ClassifierModel& model() const { return model_; }

 private:
  ClassifierModel model_;
  AdamOptimizer adam_;
  std::vector<double> grad_;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Mini-batch Adam over shuffled `train`, early-stopped on `validation`
// accuracy with validation loss breaking ties (train metrics when
// validation is empty). Throws kConfig when
// only one class is present and kDivergence on a non-finite loss.
TrainResult Train(ClassifierModel init, std::span<const Example> train,
                  std::span<const Example> validation,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

struct GradCheckOptions {
  double step = 1e-5;
  // Lower bound on the denominator of the relative error, so entries whose
  // true gradient is zero (dead ReLU paths) compare on an absolute scale.
  double zero_floor = 1e-8;
  // 0 checks every parameter; otherwise an evenly strided sample of at most
  // this many entries from each tensor.
  std::size_t max_per_tensor = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Analytic gradient of the mean batch loss against central differences.
GradCheckResult GradCheck(const ClassifierModel& model,
                          std::span<const Example> batch,
                          const GradCheckOptions& options = {});

}  // namespace dualvoice

#endif  // DUALVOICE_TRAINER_H_
