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

#ifndef DUALVOICE_DISCRIMINATOR_SERVICE_H_
#define DUALVOICE_DISCRIMINATOR_SERVICE_H_

#include <atomic>
#include <cstdint>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "dualvoice/classifier_model.h"
#include "dualvoice/wire.h"

namespace dualvoice {

// Per-packet labelling service. Each AUDIO frame gets one LABEL frame in
// submission order; any malformed frame gets an ERROR frame and the
// connection is closed. Connections are served concurrently.
class DiscriminatorServer {
 public:
  DiscriminatorServer(ClassifierModel model, double gate_db);
  ~DiscriminatorServer();

  DiscriminatorServer(const DiscriminatorServer&) = delete;
  DiscriminatorServer& operator=(const DiscriminatorServer&) = delete;

  void Start(const std::string& host, std::uint16_t port);
  std::uint16_t port() const { return port_; }
  void Stop();
  // Blocks until Stop() is called from another thread.
  void Wait();

  struct Reply {
    std::vector<std::uint8_t> bytes;
    bool close = false;
  };
  Reply Handle(const Frame& frame) const;

 private:
  void AcceptLoop();
  void Serve(int fd);

  ClassifierModel model_;
  double gate_db_;
  Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::vector<std::thread> workers_;
  std::set<int> open_fds_;
};

}  // namespace dualvoice

#endif  // DUALVOICE_DISCRIMINATOR_SERVICE_H_
