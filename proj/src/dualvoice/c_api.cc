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

#include "dualvoice/dualvoice.h"

#include <chrono>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "dualvoice/audio_io.h"
#include "dualvoice/classifier.h"
#include "dualvoice/classifier_model.h"
#include "dualvoice/console_service.h"
#include "dualvoice/corpus.h"
#include "dualvoice/discriminator_service.h"
#include "dualvoice/error.h"
#include "dualvoice/metrics.h"
#include "dualvoice/router.h"
#include "dualvoice/session.h"

struct dv_model {
  dualvoice::ClassifierModel model;
};

struct dv_session_report {
  dualvoice::SessionReport report;
};

struct dv_server {
  explicit dv_server(dualvoice::ClassifierModel m, double gate_db)
      : server(std::move(m), gate_db) {}
  dualvoice::DiscriminatorServer server;
};

struct dv_console {
  dv_console(dualvoice::ClassifierModel m, double gate_db, std::uint64_t seed)
      : console(std::move(m), gate_db, seed) {}
  dualvoice::ConsoleServer console;
  std::string document;
};

namespace {

using dualvoice::Error;
using dualvoice::ErrorCode;

thread_local std::string g_last_error;

dv_status Fail(dv_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
dv_status Guard(F&& body) {
  try {
    body();
    return DV_OK;
  } catch (const Error& e) {
    return Fail(static_cast<dv_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(DV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(DV_ERR_INTERNAL, e.what());
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

dualvoice::TrainConfig ToConfig(const dv_train_options& o) {
  dualvoice::TrainConfig cfg;
  cfg.learning_rate = o.learning_rate;
  cfg.batch_size = o.batch_size;
  cfg.max_epochs = o.max_epochs;
  cfg.patience = o.patience;
  cfg.seed = o.seed;
  return cfg;
}

dualvoice::ClassifierModel InitialModel(const dv_train_options& o) {
  if (o.frontend == DV_FRONTEND_MFCC) return dualvoice::ClassifierModel::CreateMfcc(o.seed);
  Require(o.frontend == DV_FRONTEND_CONV, "unknown frontend");
  Require(o.conv_channels > 0, "conv_channels must be > 0");
  return dualvoice::ClassifierModel::CreateConv(o.seed, static_cast<int>(o.conv_channels));
}

void TrainCorpus(const dualvoice::Corpus& corpus, const dv_train_options* options,
                 dv_epoch_callback on_epoch, void* user, dv_model** out,
                 dv_train_report* report) {
  Require(out != nullptr, "out is null");
  dv_train_options o;
  dv_train_options_init(&o);
  if (options) o = *options;
  const auto start = std::chrono::steady_clock::now();
  dualvoice::EpochCallback cb;
  if (on_epoch) {
    cb = [on_epoch, user](const dualvoice::EpochStats& s) {
      on_epoch(s.epoch, s.train_loss, s.train_accuracy, s.validation_accuracy, user);
    };
  }
  auto r = dualvoice::TrainOnCorpus(corpus, InitialModel(o), ToConfig(o), o.gate_db, cb);
  if (report) {
    report->held_out_accuracy = r.held_out_accuracy;
    report->best_validation_accuracy = r.training.best_validation_accuracy;
    report->best_epoch = r.training.best_epoch;
    report->epochs_run = static_cast<int>(r.training.history.size());
    report->train_examples = r.train_examples;
    report->validation_examples = r.validation_examples;
    report->held_out_examples = r.held_out_examples;
    report->gated_segments = r.gated_segments;
    report->seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  *out = new dv_model{std::move(r.training.model)};
}

dv_label ToLabel(dualvoice::Label l) { return static_cast<dv_label>(l); }

}  // namespace

extern "C" {

const char* dv_version(void) { return "1.0.0"; }

const char* dv_status_string(dv_status status) {
  return dualvoice::ErrorCodeName(static_cast<ErrorCode>(status));
}

const char* dv_last_error(void) { return g_last_error.c_str(); }

dv_status dv_model_create(int frontend, uint32_t conv_channels, uint64_t seed,
                          dv_model** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    dv_train_options o;
    dv_train_options_init(&o);
    o.frontend = frontend;
    o.conv_channels = conv_channels;
    o.seed = seed;
    *out = new dv_model{InitialModel(o)};
  });
}

dv_status dv_model_load(const char* path, dv_model** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "path/out is null");
    *out = new dv_model{dualvoice::LoadModel(path)};
  });
}

dv_status dv_model_save(const dv_model* model, const char* path) {
  return Guard([&] {
    Require(model != nullptr && path != nullptr, "model/path is null");
    dualvoice::SaveModel(model->model, path);
  });
}

dv_status dv_model_info_get(const dv_model* model, dv_model_info* out) {
  return Guard([&] {
    Require(model != nullptr && out != nullptr, "model/out is null");
    const auto& m = model->model;
    out->frontend = static_cast<int>(m.frontend());
    out->feature_dim = static_cast<uint32_t>(m.feature_dim());
    out->hidden = static_cast<uint32_t>(m.hidden());
    out->conv_channels = static_cast<uint32_t>(m.conv_channels());
    out->parameter_count = m.param_count();
    out->head_parameter_count = m.head_param_count();
  });
}

void dv_model_free(dv_model* model) { delete model; }

dv_status dv_corpus_generate(int n_per_class, uint64_t seed, const char* out_dir) {
  return Guard([&] {
    Require(out_dir != nullptr, "out_dir is null");
    dualvoice::WriteCorpus(dualvoice::GenerateCorpus(n_per_class, seed), out_dir);
  });
}

void dv_train_options_init(dv_train_options* options) {
  if (!options) return;
  const dualvoice::TrainConfig cfg;
  options->frontend = DV_FRONTEND_MFCC;
  options->conv_channels = dualvoice::kDeskConvChannels;
  options->learning_rate = cfg.learning_rate;
  options->batch_size = static_cast<uint32_t>(cfg.batch_size);
  options->max_epochs = cfg.max_epochs;
  options->patience = cfg.patience;
  options->seed = cfg.seed;
  options->gate_db = dualvoice::kDefaultGateDb;
}

dv_status dv_train(const char* corpus_dir, const dv_train_options* options,
                   dv_epoch_callback on_epoch, void* user, dv_model** out,
                   dv_train_report* report) {
  return Guard([&] {
    Require(corpus_dir != nullptr, "corpus_dir is null");
    TrainCorpus(dualvoice::ReadCorpus(corpus_dir), options, on_epoch, user, out, report);
  });
}

dv_status dv_train_synthetic(int n_per_class, uint64_t corpus_seed,
                             const dv_train_options* options, dv_epoch_callback on_epoch,
                             void* user, dv_model** out, dv_train_report* report) {
  return Guard([&] {
    TrainCorpus(dualvoice::GenerateCorpus(n_per_class, corpus_seed), options, on_epoch,
                user, out, report);
  });
}

dv_status dv_export_features(const dv_model* model, const char* corpus_dir,
                             double gate_db, const char* csv_path) {
  return Guard([&] {
    Require(model != nullptr && corpus_dir != nullptr && csv_path != nullptr,
            "model/corpus_dir/csv_path is null");
    auto examples = dualvoice::BuildExamples(dualvoice::ReadCorpus(corpus_dir), gate_db);
    std::vector<dualvoice::Example> all = std::move(examples.train);
    all.insert(all.end(), std::make_move_iterator(examples.held_out.begin()),
               std::make_move_iterator(examples.held_out.end()));
    std::ofstream csv(csv_path);
    if (!csv) throw Error(ErrorCode::kIo, std::string("cannot write ") + csv_path);
    dualvoice::ExportFeatures(model->model, all, csv);
    if (!csv) throw Error(ErrorCode::kIo, std::string("failed writing ") + csv_path);
  });
}

dv_status dv_classify_wav(const dv_model* model, const char* wav_path, double gate_db,
                          dv_label_callback on_label, void* user,
                          uint64_t* dropped_samples) {
  return Guard([&] {
    Require(model != nullptr && wav_path != nullptr, "model/wav_path is null");
    auto wav = dualvoice::ReadWav(wav_path);
    auto seg = dualvoice::SegmentStream(wav.samples);
    auto labeled = dualvoice::LabelStream(seg.segments, model->model, gate_db);
    if (dropped_samples) *dropped_samples = seg.dropped_samples;
    if (!on_label) return;
    for (const auto& ls : labeled) {
      dv_packet_label l;
      l.index = ls.segment.index;
      l.power_dbfs = dualvoice::SegmentPowerDbfs(ls.segment);
      l.raw = ToLabel(ls.raw.kind);
      l.raw_confidence = static_cast<float>(ls.raw.confidence);
      l.smoothed = ToLabel(ls.smoothed.kind);
      l.confidence = static_cast<float>(ls.smoothed.confidence);
      on_label(&l, user);
    }
  });
}

dv_status dv_route_wav(const dv_model* model, const char* wav_path, double gate_db,
                       const char* out_normal, const char* out_whisper,
                       dv_route_summary* summary) {
  return Guard([&] {
    Require(model != nullptr && wav_path != nullptr && out_normal != nullptr &&
                out_whisper != nullptr,
            "model/paths are null");
    auto wav = dualvoice::ReadWav(wav_path);
    auto seg = dualvoice::SegmentStream(wav.samples);
    auto labeled = dualvoice::LabelStream(seg.segments, model->model, gate_db);
    auto routed = dualvoice::Route(labeled);
    dualvoice::WriteWav(out_normal, dualvoice::Flatten(routed.normal));
    dualvoice::WriteWav(out_whisper, dualvoice::Flatten(routed.whisper));
    if (summary) {
      *summary = dv_route_summary{};
      summary->packets = labeled.size();
      summary->dropped_samples = seg.dropped_samples;
      for (const auto& ls : labeled) {
        switch (ls.smoothed.kind) {
          case dualvoice::Label::kNormal: ++summary->normal_packets; break;
          case dualvoice::Label::kWhisper: ++summary->whisper_packets; break;
          case dualvoice::Label::kSilence: ++summary->silence_packets; break;
        }
      }
    }
  });
}

dv_status dv_session_run(const char* script_path, const dv_model* model, double gate_db,
                         dv_session_report** out) {
  return Guard([&] {
    Require(script_path != nullptr && model != nullptr && out != nullptr,
            "script_path/model/out is null");
    auto script = dualvoice::LoadSessionScript(script_path);
    *out = new dv_session_report{dualvoice::RunSession(script, model->model, gate_db)};
  });
}

dv_status dv_session_render_wav(const char* script_path, const char* wav_path) {
  return Guard([&] {
    Require(script_path != nullptr && wav_path != nullptr, "paths are null");
    auto script = dualvoice::LoadSessionScript(script_path);
    dualvoice::WriteWav(wav_path, dualvoice::RenderSessionAudio(script));
  });
}

int dv_session_report_pass(const dv_session_report* r) { return r && r->report.pass; }
const char* dv_session_report_name(const dv_session_report* r) {
  return r ? r->report.name.c_str() : "";
}
const char* dv_session_report_document(const dv_session_report* r) {
  return r ? r->report.document.c_str() : "";
}
const char* dv_session_report_expected(const dv_session_report* r) {
  return r ? r->report.expected.c_str() : "";
}
const char* dv_session_report_diff(const dv_session_report* r) {
  return r ? r->report.diff.c_str() : "";
}
double dv_session_report_accuracy(const dv_session_report* r) {
  return r ? r->report.accuracy : 0.0;
}
size_t dv_session_report_warning_count(const dv_session_report* r) {
  return r ? r->report.warnings.size() : 0;
}
const char* dv_session_report_warning(const dv_session_report* r, size_t i) {
  return r && i < r->report.warnings.size() ? r->report.warnings[i].c_str() : nullptr;
}
size_t dv_session_report_event_count(const dv_session_report* r) {
  return r ? r->report.event_log.size() : 0;
}
const char* dv_session_report_event(const dv_session_report* r, size_t i) {
  return r && i < r->report.event_log.size() ? r->report.event_log[i].c_str() : nullptr;
}
void dv_session_report_free(dv_session_report* r) { delete r; }

dv_status dv_server_start(const dv_model* model, const char* host, uint16_t port,
                          double gate_db, dv_server** out) {
  return Guard([&] {
    Require(model != nullptr && out != nullptr, "model/out is null");
    auto s = std::make_unique<dv_server>(model->model, gate_db);
    s->server.Start(host ? host : "127.0.0.1", port);
    *out = s.release();
  });
}
uint16_t dv_server_port(const dv_server* s) { return s ? s->server.port() : 0; }
void dv_server_wait(dv_server* s) {
  if (s) s->server.Wait();
}
void dv_server_stop(dv_server* s) {
  if (s) s->server.Stop();
}
void dv_server_free(dv_server* s) { delete s; }

dv_status dv_console_start(const dv_model* model, const char* host, uint16_t port,
                           double gate_db, uint64_t seed, dv_console** out) {
  return Guard([&] {
    Require(model != nullptr && out != nullptr, "model/out is null");
    auto c = std::make_unique<dv_console>(model->model, gate_db, seed);
    c->console.Start(host ? host : "127.0.0.1", port);
    *out = c.release();
  });
}
uint16_t dv_console_port(const dv_console* c) { return c ? c->console.port() : 0; }
dv_status dv_console_inject(dv_console* c, const char* mode, const char* text) {
  return Guard([&] {
    Require(c != nullptr && mode != nullptr && text != nullptr, "console/mode/text is null");
    dualvoice::SessionStep step;
    const std::string m = mode;
    Require(m == "normal" || m == "whisper", "mode must be normal or whisper");
    Require(*text != '\0', "text is empty");
    step.mode = m == "normal" ? dualvoice::Label::kNormal : dualvoice::Label::kWhisper;
    step.text = text;
    c->console.Inject(step);
  });
}
const char* dv_console_document(dv_console* c) {
  if (!c) return "";
  c->document = c->console.document();
  return c->document.c_str();
}
void dv_console_wait(dv_console* c) {
  if (c) c->console.Wait();
}
void dv_console_stop(dv_console* c) {
  if (c) c->console.Stop();
}
void dv_console_free(dv_console* c) { delete c; }

double dv_wer(const char* reference, const char* hypothesis) {
  return dualvoice::Wer(reference ? reference : "", hypothesis ? hypothesis : "");
}
double dv_cer(const char* reference, const char* hypothesis) {
  return dualvoice::Cer(reference ? reference : "", hypothesis ? hypothesis : "");
}

}  // extern "C"
