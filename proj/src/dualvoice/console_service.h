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

#ifndef DUALVOICE_CONSOLE_SERVICE_H_
#define DUALVOICE_CONSOLE_SERVICE_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dualvoice/classifier_model.h"
#include "dualvoice/events.h"
#include "dualvoice/session.h"
#include "dualvoice/wire.h"

namespace dualvoice {

// Minimal RFC 6455 pieces: enough for a browser client exchanging text
// messages with this process.
namespace ws {

enum class Opcode : std::uint8_t {
  kContinuation = 0x0,
  kText = 0x1,
  kBinary = 0x2,
  kClose = 0x8,
  kPing = 0x9,
  kPong = 0xA,
};

inline constexpr std::size_t kMaxMessage = 64 * 1024;

// base64(SHA-1(key + RFC GUID)).
std::string AcceptKey(const std::string& client_key);

// Server frames go out unmasked; pass a key to build a client frame.
std::vector<std::uint8_t> EncodeFrame(Opcode opcode, std::string_view payload,
                                      std::optional<std::uint32_t> mask = std::nullopt);

struct Message {
  Opcode opcode = Opcode::kText;
  std::string payload;
};

enum class ReadResult { kOk, kClosed, kProtocolError, kTooBig };

// Reads one complete message, joining fragments and unmasking. With
// `require_mask` an unmasked frame is a protocol error.
ReadResult ReadMessage(const Socket& socket, Message* out, bool require_mask);

}  // namespace ws

// Push channel for the operator console. On connect a client receives a
// full editor_state snapshot; afterwards every ConsoleEvent is broadcast as
// one text message. Clients may send
//   {"type":"inject_step","mode":"normal"|"whisper","text":...,
//    "recognized"?,"alternatives"?,"inject_rank"?}
// which runs the step through the audio pipeline, or {"type":"snapshot"}.
class ConsoleServer {
 public:
  ConsoleServer(ClassifierModel model, double gate_db, std::uint64_t seed);
  ~ConsoleServer();

  ConsoleServer(const ConsoleServer&) = delete;
  ConsoleServer& operator=(const ConsoleServer&) = delete;

  void Start(const std::string& host, std::uint16_t port);
  std::uint16_t port() const { return port_; }
  void Stop();
  void Wait();

  // Same path as a client inject_step request.
  StepReport Inject(const SessionStep& step);
  std::string document() const;
  std::vector<std::string> event_log() const { return log_.lines(); }

 private:
  struct Client {
    Socket socket;
    std::mutex write_mu;
    bool ready = false;  // handshake done
    bool open = true;
  };

  void AcceptLoop();
  void Serve(std::shared_ptr<Client> client);
  bool Handshake(Client& client);
  void Send(Client& client, const std::string& text);
  void Broadcast(const std::string& line);
  void SendSnapshot(Client& client);
  void HandleRequest(Client& client, const std::string& text);

  ClassifierModel model_;
  EventLog log_;
  mutable std::mutex session_mu_;
  LiveSession session_;

  Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex clients_mu_;
  std::vector<std::shared_ptr<Client>> clients_;
  std::vector<std::thread> workers_;
};

}  // namespace dualvoice

#endif  // DUALVOICE_CONSOLE_SERVICE_H_
