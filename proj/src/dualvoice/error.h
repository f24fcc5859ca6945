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

#ifndef DUALVOICE_ERROR_H_
#define DUALVOICE_ERROR_H_

#include <stdexcept>
#include <string>

namespace dualvoice {

// Mirrors dv_status in the public C header; values must stay in sync.
enum class ErrorCode {
  kOk = 0,
  kInvalidArgument = 1,
  kIo = 2,
  kFormat = 3,
  kUnsupportedFormat = 4,
  kUnsupportedVersion = 5,
  kConfig = 6,
  kDivergence = 7,
  kUnknownUtterance = 8,
  kBackendUnavailable = 9,
  kProtocol = 10,
  kInternal = 11,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dualvoice

#endif  // DUALVOICE_ERROR_H_
