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

#include "dualvoice/discriminator_service.h"

#include <sys/socket.h>

#include "dualvoice/classifier.h"
#include "dualvoice/error.h"

namespace dualvoice {

DiscriminatorServer::DiscriminatorServer(ClassifierModel model, double gate_db)
    : model_(std::move(model)), gate_db_(gate_db) {}

DiscriminatorServer::~DiscriminatorServer() { Stop(); }

void DiscriminatorServer::Start(const std::string& host, std::uint16_t port) {
  listener_ = ListenTcp(host, port);
  port_ = LocalPort(listener_);
  running_ = true;
  acceptor_ = std::thread([this] { AcceptLoop(); });
}

void DiscriminatorServer::Stop() {
  if (!running_.exchange(false)) {
    if (acceptor_.joinable()) acceptor_.join();
    return;
  }
  listener_.Shutdown();
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
  listener_.Close();
}

void DiscriminatorServer::Wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

void DiscriminatorServer::AcceptLoop() {
  while (running_) {
    int fd = ::accept(listener_.fd(), nullptr, nullptr);
    if (fd < 0) {
      if (!running_) break;
      continue;
    }
    std::lock_guard<std::mutex> lock(mu_);
    open_fds_.insert(fd);
    workers_.emplace_back([this, fd] { Serve(fd); });
  }
}

DiscriminatorServer::Reply DiscriminatorServer::Handle(
    const Frame& frame) const {
  if (frame.message_type() != MessageType::kAudio) {
    return {EncodeTextFrame(MessageType::kError, "bad-type"), true};
  }
  if (frame.payload.size() != kAudioPayloadSize) {
    return {EncodeTextFrame(MessageType::kError, "bad-length"), true};
  }
  AudioSegment seg = DecodeAudioPayload(frame.payload);
  auto gated = Gate(seg, gate_db_);
  SegmentLabel label = gated ? *gated : Classify(seg, model_);
  return {EncodeFrame(MessageType::kLabel, EncodeLabelPayload(label)), false};
}

void DiscriminatorServer::Serve(int fd) {
  Socket conn(fd);
  try {
    for (;;) {
      Frame frame;
      auto status = ReadFrame(conn, &frame);
      if (status == ReadStatus::kOversized) {
        WriteAll(conn, EncodeTextFrame(MessageType::kError, "oversized"));
        break;
      }
      if (status != ReadStatus::kOk) break;
      auto reply = Handle(frame);
      WriteAll(conn, reply.bytes);
      if (reply.close) break;
    }
  } catch (const Error&) {
    // Peer went away mid-write.
  }
  // Half-close and drain so unread input does not turn into a reset that
  // would discard the ERROR frame.
  ::shutdown(conn.fd(), SHUT_WR);
  std::uint8_t sink[4096];
  while (ReadExact(conn, sink, std::chrono::milliseconds(200)) ==
         ReadStatus::kOk) {
  }
  std::lock_guard<std::mutex> lock(mu_);
  open_fds_.erase(fd);
  conn.Close();
}

}  // namespace dualvoice
