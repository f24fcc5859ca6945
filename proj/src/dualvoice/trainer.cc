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

#include "dualvoice/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dualvoice/error.h"

namespace dualvoice {
namespace {

std::vector<const Example*> Pointers(std::span<const Example> data) {
  std::vector<const Example*> out;
  out.reserve(data.size());
  for (const auto& ex : data) out.push_back(&ex);
  return out;
}

}  // namespace

AdamOptimizer::AdamOptimizer(std::size_t size, const TrainConfig& config)
    : config_(config), m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::Step(std::span<double> params,
                         std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
  }
}

Trainer::Trainer(ClassifierModel model, const TrainConfig& config)
    : model_(std::move(model)),
      adam_(model_.param_count(), config),
      grad_(model_.param_count(), 0.0) {}

double Trainer::Step(std::span<const Example* const> batch) {
  const double loss = BatchLossAndGradient(model_, batch, grad_);
  adam_.Step(model_.params(), grad_);
  return loss;
}

TrainResult Train(ClassifierModel init, std::span<const Example> train,
                  std::span<const Example> validation,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  bool has[2] = {false, false};
  for (const auto& ex : train) {
    if (ex.label != 0 && ex.label != 1) {
      throw Error(ErrorCode::kConfig, "train: label outside {0,1}");
    }
    has[ex.label] = true;
  }
  if (!has[0] || !has[1]) {
    throw Error(ErrorCode::kConfig,
                "train: dataset must contain both normal and whisper examples");
  }
  if (config.batch_size == 0 || config.max_epochs <= 0) {
    throw Error(ErrorCode::kConfig, "train: batch size and epochs must be > 0");
  }

  Trainer trainer(std::move(init), config);
  std::mt19937_64 rng(config.seed);
  auto order = Pointers(train);

  TrainResult result;
  result.model = trainer.model();
  result.best_validation_accuracy = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::span<const Example* const> batch(order.data() + start, end - start);
      const double loss = trainer.Step(batch);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kDivergence,
                    "train: non-finite loss at epoch " + std::to_string(epoch) +
                        " batch " + std::to_string(batches));
      }
      loss_sum += loss;
      ++batches;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(std::max<std::size_t>(batches, 1));
    const Evaluation on_train = Evaluate(trainer.model(), train);
    const Evaluation on_val =
        validation.empty() ? on_train : Evaluate(trainer.model(), validation);
    stats.train_accuracy = on_train.accuracy;
    stats.validation_accuracy = on_val.accuracy;
    stats.validation_loss = on_val.loss;
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);

    const bool better =
        stats.validation_accuracy > result.best_validation_accuracy ||
        (stats.validation_accuracy == result.best_validation_accuracy &&
         stats.validation_loss < best_loss);
    if (better) {
      result.best_validation_accuracy = stats.validation_accuracy;
      result.best_epoch = epoch;
      result.model = trainer.model();
      best_loss = stats.validation_loss;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  result.model.RoundToFloat();
  return result;
}

GradCheckResult GradCheck(const ClassifierModel& model,
                          std::span<const Example> batch,
                          const GradCheckOptions& options) {
  auto ptrs = Pointers(batch);
  std::vector<double> analytic(model.param_count(), 0.0);
  BatchLossAndGradient(model, ptrs, analytic);

  std::vector<std::size_t> indices;
  for (const auto& tensor : model.Tensors()) {
    const std::size_t n = tensor.size;
    const std::size_t take =
        options.max_per_tensor == 0 ? n : std::min(n, options.max_per_tensor);
    for (std::size_t i = 0; i < take; ++i) {
      indices.push_back(tensor.offset + i * n / take);
    }
  }

  ClassifierModel probe = model;
  std::vector<double> unused;
  GradCheckResult result;
  for (std::size_t idx : indices) {
    const double original = probe.params()[idx];
    probe.params()[idx] = original + options.step;
    const double plus = BatchLossAndGradient(probe, ptrs, unused);
    probe.params()[idx] = original - options.step;
    const double minus = BatchLossAndGradient(probe, ptrs, unused);
    probe.params()[idx] = original;

    const double numeric = (plus - minus) / (2.0 * options.step);
    const double a = analytic[idx];
    const double diff = std::abs(a - numeric);
    const double scale =
        std::max({std::abs(a), std::abs(numeric), options.zero_floor});
    const double rel = diff / scale;
    ++result.checked;
    if (result.checked == 1 || rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_index = idx;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace dualvoice
