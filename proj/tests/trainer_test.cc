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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "dualvoice/error.h"
#include "dualvoice/mfcc.h"
#include "test_util.h"

namespace dualvoice {
namespace {

// Two Gaussian blobs in 13-d feature space, 8 frames each.
std::vector<Example> Blobs(std::size_t per_class, std::uint64_t seed, double sep = 3.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Example> out;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    Example ex;
    ex.label = static_cast<int>(i % 2);
    ex.utterance = i;
    ex.features = FeatureSequence(8, 13);
    for (std::size_t t = 0; t < 8; ++t) {
      for (std::size_t d = 0; d < 13; ++d) {
        // Class signal lives in the shape across coefficients, which
        // survives per-frame normalization.
        const double shape = (ex.label == 0 ? 1.0 : -1.0) * sep * (d < 6 ? 1.0 : -1.0);
        ex.features.frame(t)[d] = shape + nd(rng);
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<const Example*> Ptrs(const std::vector<Example>& v) {
  std::vector<const Example*> p;
  for (const auto& e : v) p.push_back(&e);
  return p;
}

TEST(Trainer, SeparableBlobsReachFullAccuracy) {
  auto train = Blobs(64, 1), val = Blobs(32, 2);
  TrainConfig cfg;
  cfg.max_epochs = 20;
  cfg.patience = 20;
  auto r = Train(ClassifierModel::CreateMfcc(3), train, val, cfg);
  EXPECT_LE(r.history.size(), 20u);
  EXPECT_EQ(r.best_validation_accuracy, 1.0);
  EXPECT_EQ(Accuracy(r.model, Blobs(50, 99)), 1.0);
}

TEST(Trainer, SmallLearningRateLossNonIncreasing) {
  auto data = Blobs(16, 4, 1.0);
  TrainConfig cfg;
  cfg.learning_rate = 1e-4;
  Trainer t(ClassifierModel::CreateMfcc(5), cfg);
  auto batch = Ptrs(data);
  double prev = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 10; ++step) {
    const double loss = t.Step(batch);
    EXPECT_LE(loss, prev + 1e-12) << step;
    prev = loss;
  }
}

TEST(Trainer, SingleClassIsConfigError) {
  auto data = Blobs(8, 5);
  std::vector<Example> normal_only;
  for (auto& e : data) if (e.label == 0) normal_only.push_back(e);
  try {
    Train(ClassifierModel::CreateMfcc(1), normal_only, {}, TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Trainer, NonFiniteLossIsDivergence) {
  auto data = Blobs(8, 6);
  auto m = ClassifierModel::CreateMfcc(1);
  m.params()[m.fc2_b_offset()] = std::numeric_limits<double>::quiet_NaN();
  try {
    Train(m, data, {}, TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
  }
}

TEST(Trainer, SameSeedSameModel) {
  auto train = Blobs(32, 7, 0.5), val = Blobs(16, 8, 0.5);
  TrainConfig cfg;
  cfg.max_epochs = 5;
  auto a = Train(ClassifierModel::CreateMfcc(9), train, val, cfg);
  auto b = Train(ClassifierModel::CreateMfcc(9), train, val, cfg);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.model.param_count(); ++i) {
    ASSERT_EQ(a.model.params()[i], b.model.params()[i]);
  }
}

TEST(Trainer, BestEpochIsKept) {
  auto train = Blobs(32, 10, 0.3), val = Blobs(16, 11, 0.3);
  TrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.patience = 3;
  auto r = Train(ClassifierModel::CreateMfcc(2), train, val, cfg);
  ASSERT_GE(r.best_epoch, 1);
  const auto& best = r.history[r.best_epoch - 1];
  for (const auto& h : r.history) {
    EXPECT_TRUE(h.validation_accuracy < best.validation_accuracy ||
                (h.validation_accuracy == best.validation_accuracy &&
                 h.validation_loss >= best.validation_loss));
  }
  EXPECT_EQ(r.best_validation_accuracy, best.validation_accuracy);
  // Stopped at most `patience` epochs after the best one.
  EXPECT_LE(static_cast<int>(r.history.size()), r.best_epoch + cfg.patience);
}

// Central differences computed here, independent of the library helper.
double MaxRelativeError(const ClassifierModel& model, const std::vector<Example>& batch,
                        std::size_t stride, double floor) {
  auto ptrs = Ptrs(batch);
  std::vector<double> g(model.param_count());
  BatchLossAndGradient(model, ptrs, g);
  ClassifierModel probe = model;
  std::vector<double> none;
  double worst = 0.0;
  for (std::size_t i = 0; i < model.param_count(); i += stride) {
    const double h = 1e-5, orig = probe.params()[i];
    probe.params()[i] = orig + h;
    const double lp = BatchLossAndGradient(probe, ptrs, none);
    probe.params()[i] = orig - h;
    const double lm = BatchLossAndGradient(probe, ptrs, none);
    probe.params()[i] = orig;
    const double num = (lp - lm) / (2 * h);
    const double diff = std::abs(num - g[i]);
    if (diff > floor) worst = std::max(worst, diff / std::max(std::abs(num), std::abs(g[i])));
  }
  return worst;
}

std::vector<Example> AudioBatch(std::size_t n, std::uint64_t seed) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < n; ++i) {
    Example ex;
    ex.label = static_cast<int>(i % 2);
    ex.samples = i % 2 ? testing::Noise(1600, 0.2, seed + i)
                       : testing::Sine(1600, 150.0 + 10.0 * i, 0.5);
    ex.features = Mfcc(ex.samples);
    out.push_back(std::move(ex));
  }
  return out;
}

TEST(GradCheck, MfccAllParameters) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto model = ClassifierModel::CreateMfcc(seed);
    auto batch = AudioBatch(8, seed * 100);
    EXPECT_LT(MaxRelativeError(model, batch, 1, 1e-8), 1e-4) << seed;
    EXPECT_LT(GradCheck(model, batch).max_relative_error, 1e-4);
  }
}

TEST(GradCheck, ConvSampled) {
  auto model = ClassifierModel::CreateConv(4, 4, 16);
  auto batch = AudioBatch(4, 400);
  EXPECT_LT(MaxRelativeError(model, batch, 7, 1e-8), 1e-3);
  GradCheckOptions opts;
  opts.max_per_tensor = 40;
  auto r = GradCheck(model, batch, opts);
  EXPECT_LT(r.max_relative_error, 1e-3);
  // Finite differences never agree to the last bit; an exact zero would
  // mean the comparison was skipped.
  EXPECT_GT(r.max_relative_error, 0.0);
  EXPECT_GT(r.checked, 200u);
}

TEST(GradCheck, DeadReluUnitsHaveZeroGradient) {
  auto model = ClassifierModel::CreateMfcc(5);
  // Kill hidden unit 0 with a large negative bias.
  model.params()[model.fc1_b_offset()] = -1e6;
  auto batch = AudioBatch(4, 500);
  std::vector<double> g(model.param_count());
  BatchLossAndGradient(model, Ptrs(batch), g);
  EXPECT_EQ(g[model.fc1_b_offset()], 0.0);
  for (std::size_t d = 0; d < 13; ++d) EXPECT_EQ(g[model.fc1_w_offset() + d], 0.0);
  EXPECT_EQ(g[model.fc2_w_offset()], 0.0);
  EXPECT_LT(MaxRelativeError(model, batch, 1, 1e-8), 1e-4);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  TrainConfig cfg;
  AdamOptimizer adam(3, cfg);
  std::vector<double> p = {1.0, -2.0, 0.5};
  std::vector<double> g = {0.3, -7.0, 0.0};
  adam.Step(p, g);
  // Bias-corrected first step is lr * g / (|g| + eps).
  EXPECT_NEAR(p[0], 1.0 - 1e-3 * 0.3 / (0.3 + 1e-8), 1e-12);
  EXPECT_NEAR(p[1], -2.0 + 1e-3 * 7.0 / (7.0 + 1e-8), 1e-12);
  EXPECT_EQ(p[2], 0.5);
  EXPECT_EQ(adam.steps(), 1);
}

}  // namespace
}  // namespace dualvoice
