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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "dualvoice/error.h"
#include "dualvoice/mfcc.h"

namespace dualvoice {
namespace {

struct FrameStats {
  double mean;
  double inv_std;
};

FrameStats Stats(std::span<const double> frame) {
  double mean = 0.0;
  for (double v : frame) mean += v;
  mean /= static_cast<double>(frame.size());
  double var = 0.0;
  for (double v : frame) var += (v - mean) * (v - mean);
  var /= static_cast<double>(frame.size());
  return {mean, 1.0 / std::sqrt(var + kLayerNormEps)};
}

// Everything the backward pass needs from one forward pass.
struct Trace {
  FeatureSequence features;
  std::vector<double> xhat;  // T x D
  std::vector<double> inv_std;
  std::vector<double> pooled;
  std::vector<double> z1;
  HeadOutput out;
};

void Forward(const ClassifierModel& model, FeatureSequence features,
             Trace& tr) {
  const std::size_t dim = model.feature_dim();
  const std::size_t hidden = model.hidden();
  const std::size_t frames = features.frame_count();
  if (frames == 0) {
    throw Error(ErrorCode::kInternal, "classifier: empty feature sequence");
  }
  if (features.dim() != dim) {
    throw Error(ErrorCode::kInternal, "classifier: feature dim mismatch");
  }
  auto p = model.params();
  const double* gamma = p.data() + model.ln_gamma_offset();
  const double* beta = p.data() + model.ln_beta_offset();
  const double* w1 = p.data() + model.fc1_w_offset();
  const double* b1 = p.data() + model.fc1_b_offset();
  const double* w2 = p.data() + model.fc2_w_offset();
  const double* b2 = p.data() + model.fc2_b_offset();

  tr.xhat.assign(frames * dim, 0.0);
  tr.inv_std.assign(frames, 0.0);
  tr.pooled.assign(dim, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    auto frame = features.frame(t);
    auto st = Stats(frame);
    tr.inv_std[t] = st.inv_std;
    for (std::size_t d = 0; d < dim; ++d) {
      const double xh = (frame[d] - st.mean) * st.inv_std;
      tr.xhat[t * dim + d] = xh;
      tr.pooled[d] += gamma[d] * xh + beta[d];
    }
  }
  for (double& v : tr.pooled) v /= static_cast<double>(frames);

  tr.z1.assign(hidden, 0.0);
  tr.out.hidden.assign(hidden, 0.0);
  for (std::size_t h = 0; h < hidden; ++h) {
    double z = b1[h];
    const double* row = w1 + h * dim;
    for (std::size_t d = 0; d < dim; ++d) z += row[d] * tr.pooled[d];
    tr.z1[h] = z;
    tr.out.hidden[h] = z > 0.0 ? z : 0.0;
  }
  for (std::size_t c = 0; c < kClassCount; ++c) {
    double z = b2[c];
    const double* row = w2 + c * hidden;
    for (std::size_t h = 0; h < hidden; ++h) z += row[h] * tr.out.hidden[h];
    tr.out.logits[c] = z;
  }
  const double mx = std::max(tr.out.logits[0], tr.out.logits[1]);
  double total = 0.0;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    tr.out.probs[c] = std::exp(tr.out.logits[c] - mx);
    total += tr.out.probs[c];
  }
  for (double& v : tr.out.probs) v /= total;
  tr.features = std::move(features);
}

double CrossEntropy(const HeadOutput& out, int label) {
  const double mx = std::max(out.logits[0], out.logits[1]);
  double lse = 0.0;
  for (double z : out.logits) lse += std::exp(z - mx);
  return mx + std::log(lse) - out.logits[label];
}

}  // namespace

std::vector<double> NormalizeFrame(std::span<const double> frame) {
  auto st = Stats(frame);
  std::vector<double> out(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    out[i] = (frame[i] - st.mean) * st.inv_std;
  }
  return out;
}

FeatureSequence ComputeFrontend(const ClassifierModel& model,
                                std::span<const double> samples) {
  if (model.frontend() == Frontend::kMfcc) return Mfcc(samples);
  return ConvExtract(samples, model.conv_spec(), model.conv_weights());
}

FeatureSequence ExampleFeatures(const ClassifierModel& model,
                                const Example& example) {
  if (model.frontend() == Frontend::kMfcc && !example.features.empty()) {
    return example.features;
  }
  return ComputeFrontend(model, example.samples);
}

HeadOutput EvaluateHead(const ClassifierModel& model,
                        const FeatureSequence& features) {
  Trace tr;
  Forward(model, features, tr);
  return std::move(tr.out);
}

SegmentLabel LabelFromProbs(const std::array<double, kClassCount>& probs) {
  if (probs[1] > probs[0]) return {Label::kWhisper, probs[1]};
  return {Label::kNormal, probs[0]};
}

SegmentLabel Classify(const AudioSegment& seg, const ClassifierModel& model) {
  return LabelFromProbs(
      EvaluateHead(model, ComputeFrontend(model, seg.samples)).probs);
}

double ExampleLossAndGradient(const ClassifierModel& model,
                              const Example& example, std::span<double> grad) {
  Trace tr;
  ConvCache cache;
  const bool conv = model.frontend() == Frontend::kConv;
  FeatureSequence features;
  if (conv && !grad.empty()) {
    features = ConvExtract(example.samples, model.conv_spec(),
                           model.conv_weights(), &cache);
  } else {
    features = ExampleFeatures(model, example);
  }
  Forward(model, std::move(features), tr);
  const double loss = CrossEntropy(tr.out, example.label);
  if (grad.empty()) return loss;

  const std::size_t dim = model.feature_dim();
  const std::size_t hidden = model.hidden();
  const std::size_t frames = tr.features.frame_count();
  auto p = model.params();
  const double* gamma = p.data() + model.ln_gamma_offset();
  const double* w1 = p.data() + model.fc1_w_offset();
  const double* w2 = p.data() + model.fc2_w_offset();
  double* g = grad.data();

  std::array<double, kClassCount> dz2{};
  for (std::size_t c = 0; c < kClassCount; ++c) {
    dz2[c] = tr.out.probs[c] - (static_cast<int>(c) == example.label ? 1.0 : 0.0);
    g[model.fc2_b_offset() + c] += dz2[c];
    double* row = g + model.fc2_w_offset() + c * hidden;
    for (std::size_t h = 0; h < hidden; ++h) row[h] += dz2[c] * tr.out.hidden[h];
  }

  std::vector<double> dpooled(dim, 0.0);
  for (std::size_t h = 0; h < hidden; ++h) {
    if (tr.z1[h] <= 0.0) continue;
    double dz1 = 0.0;
    for (std::size_t c = 0; c < kClassCount; ++c) dz1 += w2[c * hidden + h] * dz2[c];
    g[model.fc1_b_offset() + h] += dz1;
    double* row = g + model.fc1_w_offset() + h * dim;
    const double* wrow = w1 + h * dim;
    for (std::size_t d = 0; d < dim; ++d) {
      row[d] += dz1 * tr.pooled[d];
      dpooled[d] += wrow[d] * dz1;
    }
  }

  std::vector<double> dfeatures(conv ? frames * dim : 0, 0.0);
  std::vector<double> dxhat(dim);
  const double inv_frames = 1.0 / static_cast<double>(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* xh = tr.xhat.data() + t * dim;
    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double dy = dpooled[d] * inv_frames;
      g[model.ln_gamma_offset() + d] += dy * xh[d];
      g[model.ln_beta_offset() + d] += dy;
      dxhat[d] = dy * gamma[d];
      mean_dxhat += dxhat[d];
      mean_dxhat_xhat += dxhat[d] * xh[d];
    }
    if (!conv) continue;
    mean_dxhat /= static_cast<double>(dim);
    mean_dxhat_xhat /= static_cast<double>(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      dfeatures[t * dim + d] =
          tr.inv_std[t] * (dxhat[d] - mean_dxhat - xh[d] * mean_dxhat_xhat);
    }
  }
  if (conv) {
    ConvBackward(example.samples, model.conv_spec(), model.conv_weights(),
                 cache, dfeatures, grad.subspan(model.conv_offset()));
  }
  return loss;
}

double BatchLossAndGradient(const ClassifierModel& model,
                            std::span<const Example* const> batch,
                            std::span<double> grad) {
  if (batch.empty()) return 0.0;
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (const Example* ex : batch) loss += ExampleLossAndGradient(model, *ex, grad);
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (double& v : grad) v *= scale;
  return loss * scale;
}

double Accuracy(const ClassifierModel& model, std::span<const Example> data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : data) {
    auto label = LabelFromProbs(EvaluateHead(model, ExampleFeatures(model, ex)).probs);
    if (static_cast<int>(label.kind) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

Evaluation Evaluate(const ClassifierModel& model, std::span<const Example> data) {
  Evaluation ev;
  if (data.empty()) return ev;
  std::size_t correct = 0;
  for (const auto& ex : data) {
    const auto probs = EvaluateHead(model, ExampleFeatures(model, ex)).probs;
    if (static_cast<int>(LabelFromProbs(probs).kind) == ex.label) ++correct;
    ev.loss -= std::log(std::max(probs[static_cast<std::size_t>(ex.label)], 1e-300));
  }
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  ev.loss /= static_cast<double>(data.size());
  return ev;
}

void ExportFeatures(const ClassifierModel& model, std::span<const Example> data,
                    std::ostream& out) {
  out << "label";
  for (std::size_t h = 0; h < model.hidden(); ++h) out << ",h" << h;
  out << '\n';
  char buf[32];
  for (const auto& ex : data) {
    auto head = EvaluateHead(model, ExampleFeatures(model, ex));
    out << (ex.label == 1 ? "whisper" : "normal");
    for (double v : head.hidden) {
      std::snprintf(buf, sizeof(buf), ",%.9g", v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace dualvoice
