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

#include "dualvoice/console_service.h"

#include <openssl/evp.h>
#include <sys/socket.h>

#include <algorithm>
#include <cctype>
#include <sstream>

#include "dualvoice/error.h"
#include <nlohmann/json.hpp>

namespace dualvoice {
namespace ws {
namespace {

constexpr const char* kGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
constexpr auto kForever = std::chrono::milliseconds(-1);

}  // namespace

std::string AcceptKey(const std::string& client_key) {
  const std::string input = client_key + kGuid;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(input.data(), input.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw Error(ErrorCode::kInternal, "SHA-1 failed");
  }
  std::string out(4 * ((len + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), digest,
                                static_cast<int>(len));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> EncodeFrame(Opcode opcode, std::string_view payload,
                                      std::optional<std::uint32_t> mask) {
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(0x80 | static_cast<std::uint8_t>(opcode)));
  const std::uint8_t mask_bit = mask ? 0x80 : 0x00;
  const std::uint64_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<std::uint8_t>(mask_bit | n));
  } else if (n <= 0xFFFF) {
    out.push_back(mask_bit | 126);
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
  } else {
    out.push_back(mask_bit | 127);
    for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(n >> s));
  }
  std::uint8_t key[4] = {0, 0, 0, 0};
  if (mask) {
    for (int i = 0; i < 4; ++i) key[i] = static_cast<std::uint8_t>(*mask >> (24 - 8 * i));
    out.insert(out.end(), key, key + 4);
  }
  for (std::size_t i = 0; i < payload.size(); ++i) {
    out.push_back(static_cast<std::uint8_t>(payload[i]) ^ key[i % 4]);
  }
  return out;
}

ReadResult ReadMessage(const Socket& socket, Message* out, bool require_mask) {
  out->payload.clear();
  bool have_first = false;
  for (;;) {
    std::uint8_t head[2];
    if (ReadExact(socket, head, kForever) != ReadStatus::kOk) return ReadResult::kClosed;
    const bool fin = head[0] & 0x80;
    if (head[0] & 0x70) return ReadResult::kProtocolError;  // no extensions
    const auto opcode = static_cast<Opcode>(head[0] & 0x0F);
    const bool masked = head[1] & 0x80;
    if (require_mask && !masked) return ReadResult::kProtocolError;
    std::uint64_t len = head[1] & 0x7F;
    if (len == 126 || len == 127) {
      std::uint8_t ext[8];
      const std::size_t bytes = len == 126 ? 2 : 8;
      if (ReadExact(socket, std::span(ext, bytes), kForever) != ReadStatus::kOk) {
        return ReadResult::kClosed;
      }
      len = 0;
      for (std::size_t i = 0; i < bytes; ++i) len = (len << 8) | ext[i];
    }
    std::uint8_t key[4] = {0, 0, 0, 0};
    if (masked && ReadExact(socket, key, kForever) != ReadStatus::kOk) {
      return ReadResult::kClosed;
    }
    if (len > kMaxMessage || out->payload.size() + len > kMaxMessage) {
      return ReadResult::kTooBig;
    }
    std::string data(len, '\0');
    if (len > 0 &&
        ReadExact(socket, std::span(reinterpret_cast<std::uint8_t*>(data.data()), len),
                  kForever) != ReadStatus::kOk) {
      return ReadResult::kClosed;
    }
    for (std::size_t i = 0; i < data.size(); ++i) data[i] ^= static_cast<char>(key[i % 4]);

    const bool control = static_cast<std::uint8_t>(opcode) & 0x08;
    if (control) {
      if (!fin || len > 125) return ReadResult::kProtocolError;
      // Control frames may interleave with fragments; hand them up whole.
      if (!have_first) {
        out->opcode = opcode;
        out->payload = std::move(data);
        return ReadResult::kOk;
      }
      if (opcode == Opcode::kClose) return ReadResult::kClosed;
      if (opcode == Opcode::kPing) {
        WriteAll(socket, EncodeFrame(Opcode::kPong, data));
      }
      continue;
    }
    if (!have_first) {
      if (opcode == Opcode::kContinuation) return ReadResult::kProtocolError;
      out->opcode = opcode;
      have_first = true;
    } else if (opcode != Opcode::kContinuation) {
      return ReadResult::kProtocolError;
    }
    out->payload += data;
    if (fin) return ReadResult::kOk;
  }
}

}  // namespace ws

namespace {

using json = nlohmann::json;

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

void WriteText(const Socket& socket, const std::string& text) {
  WriteAll(socket, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

}  // namespace

ConsoleServer::ConsoleServer(ClassifierModel model, double gate_db, std::uint64_t seed)
    : model_(std::move(model)), session_(model_, gate_db, seed, log_) {
  log_.SetSink([this](const std::string& line) { Broadcast(line); });
}

ConsoleServer::~ConsoleServer() {
  Stop();
  log_.SetSink({});
}

void ConsoleServer::Start(const std::string& host, std::uint16_t port) {
  listener_ = ListenTcp(host, port);
  port_ = LocalPort(listener_);
  running_ = true;
  acceptor_ = std::thread([this] { AcceptLoop(); });
}

void ConsoleServer::Stop() {
  if (!running_.exchange(false)) {
    if (acceptor_.joinable()) acceptor_.join();
    return;
  }
  listener_.Shutdown();
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(clients_mu_);
    for (auto& c : clients_) c->socket.Shutdown();
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
  listener_.Close();
}

void ConsoleServer::Wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

void ConsoleServer::AcceptLoop() {
  while (running_) {
    int fd = ::accept(listener_.fd(), nullptr, nullptr);
    if (fd < 0) {
      if (!running_) break;
      continue;
    }
    auto client = std::make_shared<Client>();
    client->socket = Socket(fd);
    std::lock_guard<std::mutex> lock(clients_mu_);
    clients_.push_back(client);
    workers_.emplace_back([this, client] { Serve(client); });
  }
}

bool ConsoleServer::Handshake(Client& client) {
  std::string request;
  std::uint8_t byte;
  while (request.find("\r\n\r\n") == std::string::npos) {
    if (request.size() > 8192 ||
        ReadExact(client.socket, std::span(&byte, 1), std::chrono::seconds(10)) !=
            ReadStatus::kOk) {
      return false;
    }
    request.push_back(static_cast<char>(byte));
  }
  std::istringstream in(request);
  std::string line;
  std::getline(in, line);
  std::string key;
  bool upgrade = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string name = Lower(line.substr(0, colon));
    std::string value = line.substr(colon + 1);
    value.erase(0, value.find_first_not_of(' '));
    if (name == "sec-websocket-key") key = value;
    if (name == "upgrade" && Lower(value) == "websocket") upgrade = true;
  }
  if (request.rfind("GET ", 0) != 0 || !upgrade || key.empty()) {
    WriteText(client.socket,
              "HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
    return false;
  }
  WriteText(client.socket,
            "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\n"
            "Connection: Upgrade\r\nSec-WebSocket-Accept: " +
                ws::AcceptKey(key) + "\r\n\r\n");
  return true;
}

void ConsoleServer::Send(Client& client, const std::string& text) {
  std::lock_guard<std::mutex> lock(client.write_mu);
  if (!client.ready || !client.open) return;
  try {
    WriteAll(client.socket, ws::EncodeFrame(ws::Opcode::kText, text));
  } catch (const Error&) {
    client.open = false;
  }
}

void ConsoleServer::Broadcast(const std::string& line) {
  std::vector<std::shared_ptr<Client>> clients;
  {
    std::lock_guard<std::mutex> lock(clients_mu_);
    clients = clients_;
  }
  for (auto& c : clients) Send(*c, line);
}

void ConsoleServer::SendSnapshot(Client& client) {
  std::string payload;
  {
    std::lock_guard<std::mutex> lock(session_mu_);
    payload = EditorStatePayload(session_.engine().state());
  }
  Send(client, EncodeConsoleEvent(log_.NextSeq(), EventKind::kEditorState, payload));
}

StepReport ConsoleServer::Inject(const SessionStep& step) {
  std::lock_guard<std::mutex> lock(session_mu_);
  return session_.InjectStep(step);
}

std::string ConsoleServer::document() const {
  std::lock_guard<std::mutex> lock(session_mu_);
  return session_.engine().text();
}

void ConsoleServer::HandleRequest(Client& client, const std::string& text) {
  std::string type;
  json j;
  try {
    j = json::parse(text);
    type = j.at("type").get<std::string>();
  } catch (const json::exception&) {
    log_.Append(EventKind::kWarning, WarningPayload("console: malformed request"));
    return;
  }
  if (type == "snapshot") {
    SendSnapshot(client);
    return;
  }
  if (type != "inject_step") {
    log_.Append(EventKind::kWarning, WarningPayload("console: unknown request " + type));
    return;
  }
  SessionStep step;
  try {
    // Reuse the script step parser by wrapping the request as a script.
    json script = {{"expected", ""}, {"steps", json::array({j})}};
    step = ParseSessionScript(script.dump()).steps.front();
  } catch (const Error& e) {
    log_.Append(EventKind::kWarning, WarningPayload(std::string("inject_step: ") + e.what()));
    return;
  }
  Inject(step);
}

void ConsoleServer::Serve(std::shared_ptr<Client> client) {
  if (Handshake(*client)) {
    {
      std::lock_guard<std::mutex> lock(client->write_mu);
      client->ready = true;
    }
    SendSnapshot(*client);
    for (;;) {
      ws::Message msg;
      const auto r = ws::ReadMessage(client->socket, &msg, /*require_mask=*/true);
      if (r == ws::ReadResult::kProtocolError || r == ws::ReadResult::kTooBig) {
        const std::uint16_t code = r == ws::ReadResult::kTooBig ? 1009 : 1002;
        const std::string body{static_cast<char>(code >> 8), static_cast<char>(code & 0xFF)};
        std::lock_guard<std::mutex> lock(client->write_mu);
        try {
          WriteAll(client->socket, ws::EncodeFrame(ws::Opcode::kClose, body));
        } catch (const Error&) {
        }
        break;
      }
      if (r != ws::ReadResult::kOk) break;
      if (msg.opcode == ws::Opcode::kClose) {
        std::lock_guard<std::mutex> lock(client->write_mu);
        try {
          WriteAll(client->socket,
                   ws::EncodeFrame(ws::Opcode::kClose, msg.payload.substr(0, 2)));
        } catch (const Error&) {
        }
        break;
      }
      if (msg.opcode == ws::Opcode::kPing) {
        std::lock_guard<std::mutex> lock(client->write_mu);
        try {
          WriteAll(client->socket, ws::EncodeFrame(ws::Opcode::kPong, msg.payload));
        } catch (const Error&) {
          break;
        }
        continue;
      }
      if (msg.opcode == ws::Opcode::kText) HandleRequest(*client, msg.payload);
    }
  }
  {
    std::lock_guard<std::mutex> lock(client->write_mu);
    client->open = false;
  }
  std::lock_guard<std::mutex> lock(clients_mu_);
  clients_.erase(std::remove(clients_.begin(), clients_.end(), client), clients_.end());
  ::shutdown(client->socket.fd(), SHUT_RDWR);
}

}  // namespace dualvoice
