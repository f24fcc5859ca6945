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

#include "dualvoice/classifier.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dualvoice/corpus.h"
#include "dualvoice/error.h"
#include "dualvoice/mfcc.h"
#include "dualvoice/trainer.h"
#include "test_util.h"

namespace dualvoice {
namespace {

// Straight-line forward pass over the documented flat parameter layout.
std::array<double, 2> OracleProbs(const ClassifierModel& m, const FeatureSequence& f) {
  const auto p = m.params();
  const std::size_t D = m.feature_dim(), H = m.hidden(), T = f.frame_count();
  std::vector<double> pooled(D, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double mean = 0.0, var = 0.0;
    for (std::size_t d = 0; d < D; ++d) mean += f.frame(t)[d];
    mean /= D;
    for (std::size_t d = 0; d < D; ++d) var += (f.frame(t)[d] - mean) * (f.frame(t)[d] - mean);
    var /= D;
    for (std::size_t d = 0; d < D; ++d) {
      pooled[d] += (p[d] * (f.frame(t)[d] - mean) / std::sqrt(var + 1e-9) + p[D + d]) / T;
    }
  }
  std::size_t off = 2 * D;
  std::vector<double> hid(H);
  for (std::size_t h = 0; h < H; ++h) {
    double z = p[off + H * D + h];
    for (std::size_t d = 0; d < D; ++d) z += p[off + h * D + d] * pooled[d];
    hid[h] = std::max(0.0, z);
  }
  off += H * D + H;
  std::array<double, 2> z{};
  for (std::size_t c = 0; c < 2; ++c) {
    z[c] = p[off + 2 * H + c];
    for (std::size_t h = 0; h < H; ++h) z[c] += p[off + c * H + h] * hid[h];
  }
  const double e0 = 1.0, e1 = std::exp(z[1] - z[0]);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

ClassifierModel ZeroHead(std::uint64_t seed) {
  auto m = ClassifierModel::CreateMfcc(seed);
  auto p = m.params();
  for (std::size_t i = m.fc2_w_offset(); i < m.conv_offset(); ++i) p[i] = 0.0;
  return m;
}

TEST(Classifier, ParameterLayout) {
  auto m = ClassifierModel::CreateMfcc(1);
  EXPECT_EQ(m.param_count(), 2u * 13 + 64 * 13 + 64 + 2 * 64 + 2);
  EXPECT_EQ(m.head_param_count(), m.param_count());
  auto c = ClassifierModel::CreateConv(1, 4, 8);
  EXPECT_EQ(c.param_count(),
            2u * 4 + 8 * 4 + 8 + 2 * 8 + 2 + ConvStackSpec::WithChannels(4).weight_count());
  // Fresh LayerNorm is the identity transform.
  for (std::size_t d = 0; d < 13; ++d) {
    EXPECT_EQ(m.params()[m.ln_gamma_offset() + d], 1.0);
    EXPECT_EQ(m.params()[m.ln_beta_offset() + d], 0.0);
  }
}

TEST(Classifier, ZeroLastLayerGivesEvenSplitAndNormal) {
  auto m = ZeroHead(3);
  AudioSegment seg;
  auto x = testing::Sine(1600, 440.0, 0.5);
  std::copy(x.begin(), x.end(), seg.samples.begin());
  auto out = EvaluateHead(m, Mfcc(seg.samples));
  EXPECT_EQ(out.probs[0], 0.5);
  EXPECT_EQ(out.probs[1], 0.5);
  auto label = Classify(seg, m);
  EXPECT_EQ(label.kind, Label::kNormal);
  EXPECT_EQ(label.confidence, 0.5);
}

TEST(Classifier, ForwardMatchesOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = ClassifierModel::CreateMfcc(rng());
    std::normal_distribution<double> nd(0.0, 0.3);
    for (double& v : m.params()) v += nd(rng);
    auto f = Mfcc(testing::Noise(1600, 0.5, rng()));
    auto got = EvaluateHead(m, f).probs;
    auto want = OracleProbs(m, f);
    EXPECT_NEAR(got[0], want[0], 1e-12);
    EXPECT_NEAR(got[1], want[1], 1e-12);
  }
}

TEST(Classifier, ProbabilitiesSumToOneAndArgmaxMatchesLogits) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = ClassifierModel::CreateMfcc(rng());
    auto out = EvaluateHead(m, Mfcc(testing::Noise(1600, 0.8, rng())));
    EXPECT_NEAR(out.probs[0] + out.probs[1], 1.0, 1e-12);
    EXPECT_GE(out.probs[0], 0.0);
    EXPECT_GE(out.probs[1], 0.0);
    const bool whisper_logit = out.logits[1] > out.logits[0];
    EXPECT_EQ(LabelFromProbs(out.probs).kind == Label::kWhisper, whisper_logit);
    for (double h : out.hidden) EXPECT_GE(h, 0.0);
  }
}

TEST(Classifier, ArgmaxInvariantUnderPositiveLogitScaling) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = ClassifierModel::CreateMfcc(rng());
    auto f = Mfcc(testing::Noise(1600, 0.5, rng()));
    auto base = LabelFromProbs(EvaluateHead(m, f).probs).kind;
    const double k = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
    auto scaled = m;
    for (std::size_t i = scaled.fc2_w_offset(); i < scaled.conv_offset(); ++i) scaled.params()[i] *= k;
    EXPECT_EQ(LabelFromProbs(EvaluateHead(scaled, f).probs).kind, base);
  }
}

TEST(Classifier, NormalizeFrameHasZeroMeanUnitVariance) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = testing::Noise(13, 5.0 + trial, rng());
    for (double& v : x) v += 100.0;
    auto y = NormalizeFrame(x);
    double mean = 0.0, var = 0.0;
    for (double v : y) mean += v;
    mean /= y.size();
    for (double v : y) var += (v - mean) * (v - mean);
    var /= y.size();
    EXPECT_NEAR(mean, 0.0, 1e-6);
    EXPECT_NEAR(var, 1.0, 1e-6);
  }
}

TEST(Classifier, TieResolvesToNormal) {
  EXPECT_EQ(LabelFromProbs({0.5, 0.5}).kind, Label::kNormal);
  EXPECT_EQ(LabelFromProbs({0.4, 0.6}).kind, Label::kWhisper);
  EXPECT_EQ(LabelFromProbs({0.4, 0.6}).confidence, 0.6);
}

TEST(ModelFile, SaveLoadRoundTripIsBitExact) {
  testing::TempDir dir("model");
  for (auto m : {ClassifierModel::CreateMfcc(9), ClassifierModel::CreateConv(9, 4, 16)}) {
    SaveModel(m, dir.file("m.bin"));
    auto back = LoadModel(dir.file("m.bin"));
    EXPECT_EQ(back.frontend(), m.frontend());
    EXPECT_EQ(back.hidden(), m.hidden());
    EXPECT_EQ(back.conv_channels(), m.conv_channels());
    ASSERT_EQ(back.param_count(), m.param_count());
    for (std::size_t i = 0; i < m.param_count(); ++i) ASSERT_EQ(back.params()[i], m.params()[i]);
    EXPECT_EQ(SerializeModel(back), SerializeModel(m));
  }
}

TEST(ModelFile, HeaderLayout) {
  auto bytes = SerializeModel(ClassifierModel::CreateMfcc(1));
  ASSERT_GE(bytes.size(), 18u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "DVMD");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 13);
  EXPECT_EQ(bytes[10], 64);
  EXPECT_EQ(bytes.size(), 18u + 4u * ClassifierModel::CreateMfcc(1).param_count());
}

ErrorCode LoadCode(std::vector<std::uint8_t> bytes) {
  try {
    DeserializeModel(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

TEST(ModelFile, CorruptFilesAreRejected) {
  auto good = SerializeModel(ClassifierModel::CreateMfcc(2));
  EXPECT_EQ(LoadCode(good), ErrorCode::kOk);
  auto truncated = good;
  truncated.resize(good.size() - 1);
  EXPECT_EQ(LoadCode(truncated), ErrorCode::kFormat);
  EXPECT_EQ(LoadCode({good.begin(), good.begin() + 10}), ErrorCode::kFormat);
  auto version = good;
  version[4] = 255;
  EXPECT_EQ(LoadCode(version), ErrorCode::kUnsupportedVersion);
  auto magic = good;
  magic[0] = 'X';
  EXPECT_EQ(LoadCode(magic), ErrorCode::kFormat);
  auto shape = good;
  shape[6] = 12;  // feature dim that does not match MFCC
  EXPECT_EQ(LoadCode(shape), ErrorCode::kFormat);
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(LoadCode(trailing), ErrorCode::kFormat);
  try {
    LoadModel("/nonexistent/model.bin");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(ExportFeatures, RowsColumnsAndSeparation) {
  auto corpus = GenerateCorpus(30, 21);
  TrainConfig cfg;
  cfg.max_epochs = 20;
  auto result = TrainOnCorpus(corpus, ClassifierModel::CreateMfcc(7), cfg);
  const auto& model = result.training.model;
  auto ex = BuildExamples(corpus);

  std::ostringstream a, b;
  ExportFeatures(model, ex.held_out, a);
  ExportFeatures(model, ex.held_out, b);
  EXPECT_EQ(a.str(), b.str());

  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 9), "label,h0,");
  std::array<std::vector<double>, 2> centroid{std::vector<double>(64, 0.0),
                                              std::vector<double>(64, 0.0)};
  std::vector<std::pair<int, std::vector<double>>> rows;
  std::array<int, 2> counts{};
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    int label = cell == "whisper" || cell == "1" ? 1 : 0;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 64u);
    for (std::size_t i = 0; i < 64; ++i) centroid[label][i] += v[i];
    ++counts[label];
    rows.emplace_back(label, std::move(v));
  }
  EXPECT_EQ(rows.size(), ex.held_out.size());
  ASSERT_GT(counts[0], 0);
  ASSERT_GT(counts[1], 0);
  for (int c = 0; c < 2; ++c) for (double& v : centroid[c]) v /= counts[c];
  auto dist = [](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
  };
  double intra = 0.0;
  for (const auto& [label, v] : rows) intra += dist(v, centroid[label]);
  intra /= rows.size();
  EXPECT_GT(dist(centroid[0], centroid[1]), 2.0 * intra);
}

}  // namespace
}  // namespace dualvoice
