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

// dualvoice command-line front end. Talks to the library only through the
// public C API.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "dualvoice/dualvoice.h"

namespace {

int Report(dv_status status) {
  if (status == DV_OK) return 0;
  std::fprintf(stderr, "dualvoice: %s: %s\n", dv_status_string(status), dv_last_error());
  return 2;
}

const char* LabelText(int label) {
  switch (label) {
    case DV_LABEL_NORMAL: return "normal";
    case DV_LABEL_WHISPER: return "whisper";
    default: return "silence";
  }
}

void PrintEpoch(int epoch, double loss, double train_acc, double val_acc, void*) {
  std::fprintf(stderr, "epoch %3d  loss %.6f  train %.4f  validation %.4f\n", epoch, loss,
               train_acc, val_acc);
}

void PrintLabel(const dv_packet_label* l, void*) {
  std::printf("%llu\t%.2f\t%s\t%s\t%.4f\n", static_cast<unsigned long long>(l->index),
              l->power_dbfs, LabelText(l->raw), LabelText(l->smoothed), l->confidence);
}

// Blocks SIGINT/SIGTERM so a service can wait for them with sigwait.
sigset_t BlockStopSignals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return set;
}

struct ModelHandle {
  dv_model* model = nullptr;
  ~ModelHandle() { dv_model_free(model); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whisper/normal dual-stream speech engine"};
  app.require_subcommand(1);
  int rc = 0;

  // gen-corpus
  int n = 500;
  uint64_t seed = 7;
  std::string out_dir;
  auto* gen = app.add_subcommand("gen-corpus", "Synthesize a labelled whisper/normal corpus");
  gen->add_option("--n", n, "Utterances per class")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "Base seed")->required();
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->callback([&] {
    rc = Report(dv_corpus_generate(n, seed, out_dir.c_str()));
    if (rc == 0) std::printf("wrote %d utterances to %s\n", 2 * n, out_dir.c_str());
  });

  // train
  std::string corpus_dir, frontend = "mfcc", model_out;
  dv_train_options topts;
  dv_train_options_init(&topts);
  auto* train = app.add_subcommand("train", "Train the classifier on a corpus");
  train->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  train->add_option("--frontend", frontend, "Feature front-end")
      ->check(CLI::IsMember({"mfcc", "conv"}));
  train->add_option("--out", model_out, "Model file to write")->required();
  train->add_option("--epochs", topts.max_epochs, "Maximum epochs");
  train->add_option("--patience", topts.patience, "Early-stopping patience");
  train->add_option("--seed", topts.seed, "Initialization and shuffling seed");
  train->add_option("--conv-channels", topts.conv_channels, "Conv stack width");
  train->add_option("--gate-db", topts.gate_db, "Silence gate threshold (dBFS)");
  train->callback([&] {
    topts.frontend = frontend == "conv" ? DV_FRONTEND_CONV : DV_FRONTEND_MFCC;
    ModelHandle m;
    dv_train_report report{};
    rc = Report(dv_train(corpus_dir.c_str(), &topts, PrintEpoch, nullptr, &m.model, &report));
    if (rc == 0) rc = Report(dv_model_save(m.model, model_out.c_str()));
    if (rc == 0) {
      std::printf(
          "held-out accuracy %.4f (best epoch %d of %d, %llu train / %llu validation / "
          "%llu held-out packets, %.1f s)\n",
          report.held_out_accuracy, report.best_epoch, report.epochs_run,
          static_cast<unsigned long long>(report.train_examples),
          static_cast<unsigned long long>(report.validation_examples),
          static_cast<unsigned long long>(report.held_out_examples), report.seconds);
    }
  });

  // classify / route
  std::string model_path, wav_path, out_normal, out_whisper;
  double gate_db = DV_DEFAULT_GATE_DB;
  auto* classify = app.add_subcommand("classify", "Label each 100 ms packet of a WAV file");
  classify->add_option("--model", model_path, "Model file")->required();
  classify->add_option("--wav", wav_path, "16 kHz mono PCM16 WAV")->required();
  classify->add_option("--gate-db", gate_db, "Silence gate threshold (dBFS)");
  classify->callback([&] {
    ModelHandle m;
    rc = Report(dv_model_load(model_path.c_str(), &m.model));
    if (rc) return;
    std::printf("index\tpower_dbfs\traw\tlabel\tconfidence\n");
    uint64_t dropped = 0;
    rc = Report(dv_classify_wav(m.model, wav_path.c_str(), gate_db, PrintLabel, nullptr,
                                &dropped));
    if (rc == 0 && dropped) {
      std::fprintf(stderr, "dropped %llu trailing samples\n",
                   static_cast<unsigned long long>(dropped));
    }
  });

  auto* route = app.add_subcommand("route", "Split a WAV file into normal and whisper streams");
  route->add_option("--model", model_path, "Model file")->required();
  route->add_option("--wav", wav_path, "16 kHz mono PCM16 WAV")->required();
  route->add_option("--out-normal", out_normal, "Whisper-removed stream")->required();
  route->add_option("--out-whisper", out_whisper, "Normal-removed stream")->required();
  route->add_option("--gate-db", gate_db, "Silence gate threshold (dBFS)");
  route->callback([&] {
    ModelHandle m;
    rc = Report(dv_model_load(model_path.c_str(), &m.model));
    if (rc) return;
    dv_route_summary s{};
    rc = Report(dv_route_wav(m.model, wav_path.c_str(), gate_db, out_normal.c_str(),
                             out_whisper.c_str(), &s));
    if (rc == 0) {
      std::printf("%llu packets: %llu normal, %llu whisper, %llu silence\n",
                  static_cast<unsigned long long>(s.packets),
                  static_cast<unsigned long long>(s.normal_packets),
                  static_cast<unsigned long long>(s.whisper_packets),
                  static_cast<unsigned long long>(s.silence_packets));
    }
  });

  // session run / render
  auto* session = app.add_subcommand("session", "Scripted end-to-end sessions");
  session->require_subcommand(1);
  std::string script_path, events_path;
  int train_n = 100;
  auto* run = session->add_subcommand("run", "Run a session script through the full pipeline");
  run->add_option("script", script_path, "Session script (JSON)")->required();
  run->add_option("--model", model_path,
                  "Model file; without one a model is trained on a small synthetic corpus");
  run->add_option("--train-n", train_n, "Per-class corpus size for the fallback model");
  run->add_option("--gate-db", gate_db, "Silence gate threshold (dBFS)");
  run->add_option("--events", events_path, "Write the console event log (JSON lines)");
  run->callback([&] {
    ModelHandle m;
    if (!model_path.empty()) {
      rc = Report(dv_model_load(model_path.c_str(), &m.model));
    } else {
      dv_train_options o;
      dv_train_options_init(&o);
      rc = Report(dv_train_synthetic(train_n, 7, &o, nullptr, nullptr, &m.model, nullptr));
    }
    if (rc) return;
    dv_session_report* r = nullptr;
    rc = Report(dv_session_run(script_path.c_str(), m.model, gate_db, &r));
    if (rc) return;
    for (size_t i = 0; i < dv_session_report_warning_count(r); ++i) {
      std::fprintf(stderr, "warning: %s\n", dv_session_report_warning(r, i));
    }
    if (!events_path.empty()) {
      std::ofstream ev(events_path);
      for (size_t i = 0; i < dv_session_report_event_count(r); ++i) {
        ev << dv_session_report_event(r, i) << '\n';
      }
    }
    const bool pass = dv_session_report_pass(r);
    std::printf("%s %s (packet accuracy %.3f)\n", pass ? "PASS" : "FAIL",
                dv_session_report_name(r), dv_session_report_accuracy(r));
    std::printf("document: %s\n", dv_session_report_document(r));
    if (!pass) std::printf("%s\n", dv_session_report_diff(r));
    rc = pass ? 0 : 1;
    dv_session_report_free(r);
  });
  auto* render = session->add_subcommand("render", "Write a script's synthesized audio");
  render->add_option("script", script_path, "Session script (JSON)")->required();
  render->add_option("--out", wav_path, "WAV file to write")->required();
  render->callback([&] { rc = Report(dv_session_render_wav(script_path.c_str(), wav_path.c_str())); });

  // serve / console
  uint16_t port = 0;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Run the packet labelling service");
  serve->add_option("--port", port, "TCP port (0 picks one)")->required();
  serve->add_option("--model", model_path, "Model file")->required();
  serve->add_option("--gate-db", gate_db, "Silence gate threshold (dBFS)");
  serve->add_option("--host", host, "Bind address");
  serve->callback([&] {
    ModelHandle m;
    rc = Report(dv_model_load(model_path.c_str(), &m.model));
    if (rc) return;
    sigset_t set = BlockStopSignals();
    dv_server* s = nullptr;
    rc = Report(dv_server_start(m.model, host.c_str(), port, gate_db, &s));
    if (rc) return;
    std::printf("listening on %s:%u\n", host.c_str(), dv_server_port(s));
    std::fflush(stdout);
    int sig = 0;
    sigwait(&set, &sig);
    dv_server_stop(s);
    dv_server_free(s);
  });

  auto* console = app.add_subcommand("console", "Run the operator console push channel");
  console->add_option("--port", port, "TCP port (0 picks one)")->required();
  console->add_option("--model", model_path, "Model file")->required();
  console->add_option("--gate-db", gate_db, "Silence gate threshold (dBFS)");
  console->add_option("--seed", seed, "Synthesis seed for injected steps");
  console->add_option("--host", host, "Bind address");
  console->callback([&] {
    ModelHandle m;
    rc = Report(dv_model_load(model_path.c_str(), &m.model));
    if (rc) return;
    sigset_t set = BlockStopSignals();
    dv_console* c = nullptr;
    rc = Report(dv_console_start(m.model, host.c_str(), port, gate_db, seed, &c));
    if (rc) return;
    std::printf("console channel on ws://%s:%u/\n", host.c_str(), dv_console_port(c));
    std::fflush(stdout);
    int sig = 0;
    sigwait(&set, &sig);
    dv_console_stop(c);
    dv_console_free(c);
  });

  // export-features / score
  std::string csv_path;
  auto* exportf = app.add_subcommand("export-features", "Dump pooled hidden vectors as CSV");
  exportf->add_option("--model", model_path, "Model file")->required();
  exportf->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  exportf->add_option("--out", csv_path, "CSV file")->required();
  exportf->add_option("--gate-db", gate_db, "Silence gate threshold (dBFS)");
  exportf->callback([&] {
    ModelHandle m;
    rc = Report(dv_model_load(model_path.c_str(), &m.model));
    if (rc == 0) {
      rc = Report(dv_export_features(m.model, corpus_dir.c_str(), gate_db, csv_path.c_str()));
    }
  });

  std::string ref, hyp;
  auto* score = app.add_subcommand("score", "Word and character error rate");
  score->add_option("--ref", ref, "Reference transcript")->required();
  score->add_option("--hyp", hyp, "Hypothesis transcript")->required();
  score->callback([&] {
    std::printf("wer %.6f\ncer %.6f\n", dv_wer(ref.c_str(), hyp.c_str()),
                dv_cer(ref.c_str(), hyp.c_str()));
  });

  CLI11_PARSE(app, argc, argv);
  return rc;
}
