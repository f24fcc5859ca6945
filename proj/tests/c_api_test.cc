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

// Exercises the shared library through its public C header only.
#include "dualvoice/dualvoice.h"

#include <gtest/gtest.h>

#include <cstring>
#include <string>
#include <vector>

#include "test_util.h"

namespace {

using dualvoice::testing::SourcePath;
using dualvoice::testing::TempDir;

class CApiTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dv_train_options o;
    dv_train_options_init(&o);
    o.max_epochs = 20;
    ASSERT_EQ(dv_train_synthetic(100, 7, &o, nullptr, nullptr, &model_, &report_), DV_OK)
        << dv_last_error();
  }
  static void TearDownTestSuite() { dv_model_free(model_); }
  static dv_model* model_;
  static dv_train_report report_;
};
dv_model* CApiTest::model_ = nullptr;
dv_train_report CApiTest::report_{};

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(dv_version(), "1.0.0");
  EXPECT_STREQ(dv_status_string(DV_OK), "ok");
  EXPECT_STREQ(dv_status_string(DV_ERR_UNSUPPORTED_VERSION), "unsupported-version");
  EXPECT_STREQ(dv_status_string(DV_ERR_PROTOCOL), "protocol");
}

TEST(CApi, DefaultOptions) {
  dv_train_options o;
  std::memset(&o, 0xAB, sizeof o);
  dv_train_options_init(&o);
  EXPECT_EQ(o.frontend, DV_FRONTEND_MFCC);
  EXPECT_EQ(o.conv_channels, 64u);
  EXPECT_DOUBLE_EQ(o.learning_rate, 1e-3);
  EXPECT_EQ(o.batch_size, 64u);
  EXPECT_EQ(o.max_epochs, 50);
  EXPECT_EQ(o.patience, 5);
  EXPECT_DOUBLE_EQ(o.gate_db, DV_DEFAULT_GATE_DB);
  EXPECT_DOUBLE_EQ(DV_DEFAULT_GATE_DB, -20.0);
}

TEST(CApi, ErrorsCarryMessages) {
  dv_model* m = nullptr;
  EXPECT_EQ(dv_model_load("/nonexistent/model.bin", &m), DV_ERR_IO);
  EXPECT_EQ(m, nullptr);
  EXPECT_NE(std::string(dv_last_error()).find("/nonexistent/model.bin"), std::string::npos);
  EXPECT_EQ(dv_model_load(nullptr, &m), DV_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(dv_model_create(7, 0, 1, &m), DV_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(dv_corpus_generate(0, 1, "/tmp/x"), DV_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ModelLifecycle) {
  TempDir dir("capi_model");
  dv_model* m = nullptr;
  ASSERT_EQ(dv_model_create(DV_FRONTEND_CONV, 8, 3, &m), DV_OK);
  dv_model_info info{};
  ASSERT_EQ(dv_model_info_get(m, &info), DV_OK);
  EXPECT_EQ(info.frontend, DV_FRONTEND_CONV);
  EXPECT_EQ(info.conv_channels, 8u);
  EXPECT_EQ(info.feature_dim, 8u);
  EXPECT_GT(info.parameter_count, info.head_parameter_count);
  ASSERT_EQ(dv_model_save(m, dir.file("m.bin").c_str()), DV_OK);
  dv_model* back = nullptr;
  ASSERT_EQ(dv_model_load(dir.file("m.bin").c_str(), &back), DV_OK);
  dv_model_info info2{};
  dv_model_info_get(back, &info2);
  EXPECT_EQ(info2.parameter_count, info.parameter_count);
  dv_model_free(m);
  dv_model_free(back);
  dv_model_free(nullptr);
}

TEST_F(CApiTest, TrainingReport) {
  EXPECT_GE(report_.held_out_accuracy, 0.95);
  EXPECT_GT(report_.train_examples, 0u);
  EXPECT_GT(report_.validation_examples, 0u);
  EXPECT_GT(report_.held_out_examples, 0u);
  EXPECT_GE(report_.best_epoch, 1);
  EXPECT_LE(report_.best_epoch, report_.epochs_run);
}

TEST_F(CApiTest, SessionRenderClassifyRoute) {
  TempDir dir("capi_session");
  const std::string script = SourcePath("data/sessions/spell.json");
  const std::string wav = dir.file("spell.wav");
  ASSERT_EQ(dv_session_render_wav(script.c_str(), wav.c_str()), DV_OK) << dv_last_error();

  struct Counts {
    int normal = 0, whisper = 0, silence = 0;
    uint64_t next = 0;
    bool ordered = true;
  } counts;
  uint64_t dropped = 99;
  ASSERT_EQ(dv_classify_wav(
                model_, wav.c_str(), DV_DEFAULT_GATE_DB,
                [](const dv_packet_label* l, void* user) {
                  auto* c = static_cast<Counts*>(user);
                  c->ordered &= l->index == c->next++;
                  (l->smoothed == DV_LABEL_NORMAL    ? c->normal
                   : l->smoothed == DV_LABEL_WHISPER ? c->whisper
                                                     : c->silence)++;
                },
                &counts, &dropped),
            DV_OK);
  EXPECT_TRUE(counts.ordered);
  EXPECT_EQ(dropped, 0u);
  EXPECT_GT(counts.normal, 0);
  EXPECT_GT(counts.whisper, 0);
  EXPECT_GT(counts.silence, 0);

  dv_route_summary s{};
  ASSERT_EQ(dv_route_wav(model_, wav.c_str(), DV_DEFAULT_GATE_DB, dir.file("n.wav").c_str(),
                         dir.file("w.wav").c_str(), &s),
            DV_OK);
  EXPECT_EQ(s.packets, counts.next);
  EXPECT_EQ(s.normal_packets, static_cast<uint64_t>(counts.normal));
  EXPECT_EQ(s.whisper_packets, static_cast<uint64_t>(counts.whisper));
  EXPECT_EQ(s.silence_packets, static_cast<uint64_t>(counts.silence));
  const auto in = dualvoice::testing::ReadBytes(wav);
  EXPECT_EQ(dualvoice::testing::ReadBytes(dir.file("n.wav")).size(), in.size());
  EXPECT_EQ(dualvoice::testing::ReadBytes(dir.file("w.wav")).size(), in.size());

  dv_session_report* r = nullptr;
  ASSERT_EQ(dv_session_run(script.c_str(), model_, DV_DEFAULT_GATE_DB, &r), DV_OK);
  EXPECT_TRUE(dv_session_report_pass(r));
  EXPECT_STREQ(dv_session_report_document(r), "wav2vec");
  EXPECT_STREQ(dv_session_report_expected(r), "wav2vec");
  EXPECT_STREQ(dv_session_report_name(r), "spell");
  EXPECT_GT(dv_session_report_event_count(r), 0u);
  EXPECT_EQ(dv_session_report_event(r, dv_session_report_event_count(r)), nullptr);
  dv_session_report_free(r);
}

TEST_F(CApiTest, ConsoleInject) {
  dv_console* c = nullptr;
  ASSERT_EQ(dv_console_start(model_, "127.0.0.1", 0, DV_DEFAULT_GATE_DB, 5, &c), DV_OK);
  EXPECT_GT(dv_console_port(c), 0);
  ASSERT_EQ(dv_console_inject(c, "normal", "hello"), DV_OK);
  ASSERT_EQ(dv_console_inject(c, "whisper", "comma"), DV_OK);
  EXPECT_STREQ(dv_console_document(c), "hello,");
  EXPECT_EQ(dv_console_inject(c, "shout", "x"), DV_ERR_INVALID_ARGUMENT);
  dv_console_stop(c);
  dv_console_free(c);
}

TEST_F(CApiTest, PacketServerStartsAndStops) {
  dv_server* s = nullptr;
  ASSERT_EQ(dv_server_start(model_, "127.0.0.1", 0, DV_DEFAULT_GATE_DB, &s), DV_OK);
  EXPECT_GT(dv_server_port(s), 0);
  dv_server_stop(s);
  dv_server_free(s);
}

TEST(CApi, Metrics) {
  EXPECT_DOUBLE_EQ(dv_wer("hello world is fun", "hello word is fun"), 0.25);
  EXPECT_DOUBLE_EQ(dv_cer("abcd", "abed"), 0.25);
}

}  // namespace
