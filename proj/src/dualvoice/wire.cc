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

#include "dualvoice/wire.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>

#include "dualvoice/error.h"

namespace dualvoice {
namespace {

using Clock = std::chrono::steady_clock;

std::uint32_t GetBe32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

sockaddr_in Resolve(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  const std::string h = host.empty() || host == "localhost" ? "127.0.0.1" : host;
  if (inet_pton(AF_INET, h.c_str(), &addr.sin_addr) != 1) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    addrinfo* res = nullptr;
    if (getaddrinfo(h.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "cannot resolve host " + host);
    }
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
  }
  return addr;
}

std::string Errno(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

}  // namespace

std::vector<std::uint8_t> EncodeFrame(std::uint8_t type,
                                      std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderSize + payload.size());
  const auto n = static_cast<std::uint32_t>(payload.size());
  out.push_back((n >> 24) & 0xff);
  out.push_back((n >> 16) & 0xff);
  out.push_back((n >> 8) & 0xff);
  out.push_back(n & 0xff);
  out.push_back(type);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<std::uint8_t> EncodeTextFrame(MessageType type,
                                          const std::string& text) {
  return EncodeFrame(type, std::span(reinterpret_cast<const std::uint8_t*>(
                                         text.data()),
                                     text.size()));
}

std::vector<std::uint8_t> EncodeAudioPayload(std::span<const double> samples) {
  std::vector<std::uint8_t> out;
  out.reserve(samples.size() * 2);
  for (double s : samples) {
    auto v = static_cast<std::uint16_t>(QuantizeSample(s));
    out.push_back(v & 0xff);
    out.push_back(v >> 8);
  }
  return out;
}

AudioSegment DecodeAudioPayload(std::span<const std::uint8_t> payload) {
  if (payload.size() != kAudioPayloadSize) {
    throw Error(ErrorCode::kProtocol, "bad-length");
  }
  AudioSegment seg;
  for (std::size_t i = 0; i < kPacketSamples; ++i) {
    auto v = static_cast<std::int16_t>(payload[2 * i] | (payload[2 * i + 1] << 8));
    seg.samples[i] = v / 32768.0;
  }
  return seg;
}

std::vector<std::uint8_t> EncodeLabelPayload(const SegmentLabel& label) {
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(label.kind));
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(label.confidence));
  for (int i = 0; i < 4; ++i) out.push_back((bits >> (8 * i)) & 0xff);
  return out;
}

SegmentLabel DecodeLabelPayload(std::span<const std::uint8_t> payload) {
  if (payload.size() != kLabelPayloadSize || payload[0] > 2) {
    throw Error(ErrorCode::kProtocol, "malformed LABEL payload");
  }
  std::uint32_t bits = std::uint32_t{payload[1]} | (std::uint32_t{payload[2]} << 8) |
                       (std::uint32_t{payload[3]} << 16) |
                       (std::uint32_t{payload[4]} << 24);
  return {static_cast<Label>(payload[0]), std::bit_cast<float>(bits)};
}

void FrameDecoder::Feed(std::span<const std::uint8_t> bytes) {
  if (consumed_ > 0 && consumed_ == buffer_.size()) {
    buffer_.clear();
    consumed_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

FrameDecoder::Status FrameDecoder::Next(Frame* out) {
  const std::size_t avail = buffer_.size() - consumed_;
  if (avail < kFrameHeaderSize) return Status::kNeedMore;
  const std::uint8_t* p = buffer_.data() + consumed_;
  const std::uint32_t length = GetBe32(p);
  if (length > kMaxPayload) return Status::kOversized;
  if (avail < kFrameHeaderSize + length) return Status::kNeedMore;
  out->type = p[4];
  out->payload.assign(p + kFrameHeaderSize, p + kFrameHeaderSize + length);
  consumed_ += kFrameHeaderSize + length;
  return Status::kFrame;
}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    Close();
    fd_ = other.release();
  }
  return *this;
}

void Socket::Close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::Shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Socket ListenTcp(const std::string& host, std::uint16_t port) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw Error(ErrorCode::kIo, Errno("socket"));
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = Resolve(host, port);
  if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw Error(ErrorCode::kIo, Errno("bind"));
  }
  if (::listen(s.fd(), 16) != 0) throw Error(ErrorCode::kIo, Errno("listen"));
  return s;
}

std::uint16_t LocalPort(const Socket& socket) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(socket.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw Error(ErrorCode::kIo, Errno("getsockname"));
  }
  return ntohs(addr.sin_port);
}

Socket ConnectTcp(const std::string& host, std::uint16_t port) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw Error(ErrorCode::kIo, Errno("socket"));
  sockaddr_in addr = Resolve(host, port);
  // Connection refused/timeout both mean the peer is not there.
  if (::connect(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw Error(ErrorCode::kBackendUnavailable, Errno("connect"));
  }
  int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return s;
}

void WriteAll(const Socket& socket, std::span<const std::uint8_t> bytes) {
  while (!bytes.empty()) {
    ssize_t n = ::send(socket.fd(), bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, Errno("send"));
    }
    bytes = bytes.subspan(static_cast<std::size_t>(n));
  }
}

ReadStatus ReadExact(const Socket& socket, std::span<std::uint8_t> bytes,
                     std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  std::size_t got = 0;
  while (got < bytes.size()) {
    int wait_ms = -1;
    if (timeout.count() >= 0) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - Clock::now());
      if (left.count() <= 0) return ReadStatus::kTimeout;
      wait_ms = static_cast<int>(left.count());
    }
    pollfd pfd{socket.fd(), POLLIN, 0};
    int r = ::poll(&pfd, 1, wait_ms);
    if (r < 0) {
      if (errno == EINTR) continue;
      return ReadStatus::kClosed;
    }
    if (r == 0) return ReadStatus::kTimeout;
    ssize_t n = ::recv(socket.fd(), bytes.data() + got, bytes.size() - got, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return ReadStatus::kClosed;
    got += static_cast<std::size_t>(n);
  }
  return ReadStatus::kOk;
}

ReadStatus ReadFrame(const Socket& socket, Frame* out,
                     std::chrono::milliseconds timeout) {
  std::uint8_t header[kFrameHeaderSize];
  const auto start = Clock::now();
  auto status = ReadExact(socket, header, timeout);
  if (status != ReadStatus::kOk) return status;
  const std::uint32_t length = GetBe32(header);
  if (length > kMaxPayload) return ReadStatus::kOversized;
  out->type = header[4];
  out->payload.resize(length);
  auto left = timeout;
  if (timeout.count() >= 0) {
    left = std::chrono::duration_cast<std::chrono::milliseconds>(
        timeout - (Clock::now() - start));
    if (left.count() < 0) left = std::chrono::milliseconds(0);
  }
  if (length == 0) return ReadStatus::kOk;
  status = ReadExact(socket, out->payload, left);
  // A frame cut short by EOF is a closed connection, not a message.
  return status;
}

}  // namespace dualvoice
