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

#ifndef DUALVOICE_METRICS_H_
#define DUALVOICE_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dualvoice {

// Unit-cost Levenshtein distance between token sequences.
std::size_t EditDistance(std::span<const std::string> ref,
                         std::span<const std::string> hyp);

// Splits on ASCII whitespace.
std::vector<std::string> Words(std::string_view text);
// One token per UTF-8 codepoint, whitespace included.
std::vector<std::string> Characters(std::string_view text);

// distance / |ref|; an empty reference scores 0 against an empty
// hypothesis and 1 otherwise.
double ErrorRate(std::span<const std::string> ref, std::span<const std::string> hyp);

double Wer(std::string_view ref, std::string_view hyp);
double Cer(std::string_view ref, std::string_view hyp);

}  // namespace dualvoice

#endif  // DUALVOICE_METRICS_H_
