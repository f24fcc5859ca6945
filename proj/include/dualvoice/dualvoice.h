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

/*
 * dualvoice C API.
 *
 * Every function that can fail returns a dv_status; on failure a
 * description is available from dv_last_error() on the calling thread
 * until the next failing call on that thread. Handles are opaque and must
 * be released with the matching *_free function. Strings returned by the
 * library stay valid until the owning handle is freed unless noted.
 */
#ifndef DUALVOICE_DUALVOICE_H_
#define DUALVOICE_DUALVOICE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DV_BUILDING_LIBRARY)
#define DV_API __attribute__((visibility("default")))
#else
#define DV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dv_status {
  DV_OK = 0,
  DV_ERR_INVALID_ARGUMENT = 1,
  DV_ERR_IO = 2,
  DV_ERR_FORMAT = 3,
  DV_ERR_UNSUPPORTED_FORMAT = 4,
  DV_ERR_UNSUPPORTED_VERSION = 5,
  DV_ERR_CONFIG = 6,
  DV_ERR_DIVERGENCE = 7,
  DV_ERR_UNKNOWN_UTTERANCE = 8,
  DV_ERR_BACKEND_UNAVAILABLE = 9,
  DV_ERR_PROTOCOL = 10,
  DV_ERR_INTERNAL = 11
} dv_status;

typedef enum dv_frontend { DV_FRONTEND_MFCC = 0, DV_FRONTEND_CONV = 1 } dv_frontend;

typedef enum dv_label { DV_LABEL_NORMAL = 0, DV_LABEL_WHISPER = 1, DV_LABEL_SILENCE = 2 } dv_label;

#define DV_DEFAULT_GATE_DB (-20.0)

DV_API const char* dv_version(void);
DV_API const char* dv_status_string(dv_status status);
DV_API const char* dv_last_error(void);

/* ---- models ------------------------------------------------------------ */

typedef struct dv_model dv_model;

typedef struct dv_model_info {
  int frontend; /* dv_frontend */
  uint32_t feature_dim;
  uint32_t hidden;
  uint32_t conv_channels; /* 0 for MFCC models */
  uint64_t parameter_count;
  uint64_t head_parameter_count; /* LayerNorm + both FC layers */
} dv_model_info;

/* Randomly initialized model; conv_channels is ignored for MFCC. */
DV_API dv_status dv_model_create(int frontend, uint32_t conv_channels, uint64_t seed,
                                 dv_model** out);
DV_API dv_status dv_model_load(const char* path, dv_model** out);
DV_API dv_status dv_model_save(const dv_model* model, const char* path);
DV_API dv_status dv_model_info_get(const dv_model* model, dv_model_info* out);
DV_API void dv_model_free(dv_model* model);

/* ---- corpus and training ----------------------------------------------- */

DV_API dv_status dv_corpus_generate(int n_per_class, uint64_t seed, const char* out_dir);

typedef struct dv_train_options {
  int frontend;            /* dv_frontend, default MFCC */
  uint32_t conv_channels;  /* default 64 */
  double learning_rate;    /* default 1e-3 */
  uint32_t batch_size;     /* default 64 */
  int max_epochs;          /* default 50 */
  int patience;            /* default 5 */
  uint64_t seed;           /* default 7 */
  double gate_db;          /* default -20 */
} dv_train_options;

typedef struct dv_train_report {
  double held_out_accuracy;
  double best_validation_accuracy;
  int best_epoch;
  int epochs_run;
  uint64_t train_examples;
  uint64_t validation_examples;
  uint64_t held_out_examples;
  uint64_t gated_segments;
  double seconds;
} dv_train_report;

typedef void (*dv_epoch_callback)(int epoch, double train_loss, double train_accuracy,
                                  double validation_accuracy, void* user);

DV_API void dv_train_options_init(dv_train_options* options);

/* Trains on a corpus directory written by dv_corpus_generate. Packets of
 * the held-out split are used only for report->held_out_accuracy. */
DV_API dv_status dv_train(const char* corpus_dir, const dv_train_options* options,
                          dv_epoch_callback on_epoch, void* user, dv_model** out,
                          dv_train_report* report);

/* Same, generating the corpus in memory. */
DV_API dv_status dv_train_synthetic(int n_per_class, uint64_t corpus_seed,
                                    const dv_train_options* options,
                                    dv_epoch_callback on_epoch, void* user,
                                    dv_model** out, dv_train_report* report);

/* CSV of pooled hidden vectors, one row per non-gated packet. */
DV_API dv_status dv_export_features(const dv_model* model, const char* corpus_dir,
                                    double gate_db, const char* csv_path);

/* ---- classification and routing ---------------------------------------- */

typedef struct dv_packet_label {
  uint64_t index;
  double power_dbfs;
  int raw;              /* dv_label */
  float raw_confidence;
  int smoothed;         /* dv_label */
  float confidence;
} dv_packet_label;

typedef void (*dv_label_callback)(const dv_packet_label* label, void* user);

/* Labels every full packet of a 16 kHz mono PCM16 WAV file. */
DV_API dv_status dv_classify_wav(const dv_model* model, const char* wav_path,
                                 double gate_db, dv_label_callback on_label, void* user,
                                 uint64_t* dropped_samples);

typedef struct dv_route_summary {
  uint64_t packets;
  uint64_t normal_packets;
  uint64_t whisper_packets;
  uint64_t silence_packets;
  uint64_t dropped_samples;
} dv_route_summary;

/* Writes the whisper-removed and normal-removed streams as WAV files of
 * the same length as the segmented input. */
DV_API dv_status dv_route_wav(const dv_model* model, const char* wav_path, double gate_db,
                              const char* out_normal, const char* out_whisper,
                              dv_route_summary* summary);

/* ---- sessions ----------------------------------------------------------- */

typedef struct dv_session_report dv_session_report;

DV_API dv_status dv_session_run(const char* script_path, const dv_model* model,
                                double gate_db, dv_session_report** out);
/* Writes the synthesized audio of a script as a WAV file. */
DV_API dv_status dv_session_render_wav(const char* script_path, const char* wav_path);

DV_API int dv_session_report_pass(const dv_session_report* report);
DV_API const char* dv_session_report_name(const dv_session_report* report);
DV_API const char* dv_session_report_document(const dv_session_report* report);
DV_API const char* dv_session_report_expected(const dv_session_report* report);
DV_API const char* dv_session_report_diff(const dv_session_report* report);
DV_API double dv_session_report_accuracy(const dv_session_report* report);
DV_API size_t dv_session_report_warning_count(const dv_session_report* report);
DV_API const char* dv_session_report_warning(const dv_session_report* report, size_t i);
DV_API size_t dv_session_report_event_count(const dv_session_report* report);
/* One ConsoleEvent as a JSON line. */
DV_API const char* dv_session_report_event(const dv_session_report* report, size_t i);
DV_API void dv_session_report_free(dv_session_report* report);

/* ---- services ----------------------------------------------------------- */

/* Packet labelling service over the length-prefixed TCP framing. */
typedef struct dv_server dv_server;

DV_API dv_status dv_server_start(const dv_model* model, const char* host, uint16_t port,
                                 double gate_db, dv_server** out);
DV_API uint16_t dv_server_port(const dv_server* server);
DV_API void dv_server_wait(dv_server* server);
DV_API void dv_server_stop(dv_server* server);
DV_API void dv_server_free(dv_server* server);

/* WebSocket push channel for the operator console. */
typedef struct dv_console dv_console;

DV_API dv_status dv_console_start(const dv_model* model, const char* host, uint16_t port,
                                  double gate_db, uint64_t seed, dv_console** out);
DV_API uint16_t dv_console_port(const dv_console* console);
/* Runs a step as if it were spoken; mode is "normal" or "whisper". */
DV_API dv_status dv_console_inject(dv_console* console, const char* mode, const char* text);
/* Valid until the next call on this handle. */
DV_API const char* dv_console_document(dv_console* console);
DV_API void dv_console_wait(dv_console* console);
DV_API void dv_console_stop(dv_console* console);
DV_API void dv_console_free(dv_console* console);

/* ---- metrics ------------------------------------------------------------ */

DV_API double dv_wer(const char* reference, const char* hypothesis);
DV_API double dv_cer(const char* reference, const char* hypothesis);

#ifdef __cplusplus
}
#endif

#endif /* DUALVOICE_DUALVOICE_H_ */
