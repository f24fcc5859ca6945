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

#ifndef DUALVOICE_WIRE_H_
#define DUALVOICE_WIRE_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dualvoice/audio_io.h"

namespace dualvoice {

// Frame: u32 big-endian payload length, u8 type, payload.
enum class MessageType : std::uint8_t {
  kAudio = 0x01,       // 1,600 x int16 LE
  kLabel = 0x02,       // u8 kind + f32 LE confidence
  kTranscript = 0x03,  // UTF-8 JSON, see recognizer.h
  kError = 0x7F,       // UTF-8 reason
};

inline constexpr std::size_t kFrameHeaderSize = 5;
inline constexpr std::size_t kMaxPayload = 64 * 1024;
inline constexpr std::size_t kAudioPayloadSize = kPacketSamples * 2;
inline constexpr std::size_t kLabelPayloadSize = 5;

struct Frame {
  std::uint8_t type = 0;
  std::vector<std::uint8_t> payload;

  MessageType message_type() const { return static_cast<MessageType>(type); }
};

std::vector<std::uint8_t> EncodeFrame(std::uint8_t type,
                                      std::span<const std::uint8_t> payload);
inline std::vector<std::uint8_t> EncodeFrame(
    MessageType type, std::span<const std::uint8_t> payload) {
  return EncodeFrame(static_cast<std::uint8_t>(type), payload);
}
std::vector<std::uint8_t> EncodeTextFrame(MessageType type,
                                          const std::string& text);

std::vector<std::uint8_t> EncodeAudioPayload(std::span<const double> samples);
// Throws kProtocol unless the payload is exactly kAudioPayloadSize bytes.
AudioSegment DecodeAudioPayload(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> EncodeLabelPayload(const SegmentLabel& label);
SegmentLabel DecodeLabelPayload(std::span<const std::uint8_t> payload);

// Incremental parser over a byte stream.
class FrameDecoder {
 public:
  enum class Status { kFrame, kNeedMore, kOversized };

  void Feed(std::span<const std::uint8_t> bytes);
  Status Next(Frame* out);

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t consumed_ = 0;
};

// Owning POSIX socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { Close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void Close();
  // Wakes up a thread blocked on this socket without releasing the fd.
  void Shutdown();

 private:
  int fd_ = -1;
};

// Binds and listens; port 0 picks an ephemeral port.
Socket ListenTcp(const std::string& host, std::uint16_t port);
std::uint16_t LocalPort(const Socket& socket);
Socket ConnectTcp(const std::string& host, std::uint16_t port);

void WriteAll(const Socket& socket, std::span<const std::uint8_t> bytes);

enum class ReadStatus { kOk, kClosed, kTimeout, kOversized };

// Reads one frame. A negative timeout waits indefinitely.
ReadStatus ReadFrame(const Socket& socket, Frame* out,
                     std::chrono::milliseconds timeout =
                         std::chrono::milliseconds(-1));

// Reads exactly bytes.size() bytes, or returns kClosed/kTimeout.
ReadStatus ReadExact(const Socket& socket, std::span<std::uint8_t> bytes,
                     std::chrono::milliseconds timeout);

}  // namespace dualvoice

#endif  // DUALVOICE_WIRE_H_
