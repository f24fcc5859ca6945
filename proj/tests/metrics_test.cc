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

#include "dualvoice/metrics.h"

#include <gtest/gtest.h>

#include <functional>
#include <random>

namespace dualvoice {
namespace {

// Plain exponential recursion, usable for short sequences only.
std::size_t SlowDistance(const std::vector<std::string>& a, std::size_t i,
                         const std::vector<std::string>& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  if (a[i] == b[j]) return SlowDistance(a, i + 1, b, j + 1);
  return 1 + std::min({SlowDistance(a, i + 1, b, j), SlowDistance(a, i, b, j + 1),
                       SlowDistance(a, i + 1, b, j + 1)});
}

TEST(Metrics, WerExamples) {
  EXPECT_DOUBLE_EQ(Wer("hello world is fun", "hello word is fun"), 0.25);
  EXPECT_DOUBLE_EQ(Wer("a b c", "a b c"), 0.0);
  EXPECT_DOUBLE_EQ(Wer("a b c", ""), 1.0);
  EXPECT_DOUBLE_EQ(Wer("a b", "a x b y"), 1.0);
  EXPECT_DOUBLE_EQ(Wer("", ""), 0.0);
  EXPECT_DOUBLE_EQ(Wer("", "x"), 1.0);
  EXPECT_DOUBLE_EQ(Wer("  spaced   out ", "spaced out"), 0.0);
}

TEST(Metrics, CerExamples) {
  EXPECT_DOUBLE_EQ(Cer("abcd", "abed"), 0.25);
  EXPECT_DOUBLE_EQ(Cer("hello world is fun", "hello word is fun"), 1.0 / 18.0);
  // Codepoints, not bytes.
  EXPECT_DOUBLE_EQ(Cer("caf\xC3\xA9", "cafe"), 0.25);
  EXPECT_EQ(Characters("a \xF0\x9F\x98\x8A").size(), 3u);
}

TEST(Metrics, MatchesRecursiveOracle) {
  std::mt19937 rng(1);
  const std::vector<std::string> vocab = {"a", "b", "c", "dd"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> r(rng() % 7), h(rng() % 7);
    for (auto& w : r) w = vocab[rng() % vocab.size()];
    for (auto& w : h) w = vocab[rng() % vocab.size()];
    const auto want = SlowDistance(r, 0, h, 0);
    ASSERT_EQ(EditDistance(r, h), want);
    ASSERT_EQ(EditDistance(h, r), want);  // symmetric
    const double rate = r.empty() ? (h.empty() ? 0.0 : 1.0) : double(want) / r.size();
    ASSERT_DOUBLE_EQ(ErrorRate(r, h), rate);
  }
}

TEST(Metrics, DistanceIsAMetric) {
  std::mt19937 rng(2);
  auto random_seq = [&] {
    std::vector<std::string> v(rng() % 10);
    for (auto& w : v) w = std::string(1, static_cast<char>('a' + rng() % 3));
    return v;
  };
  for (int trial = 0; trial < 300; ++trial) {
    auto x = random_seq(), y = random_seq(), z = random_seq();
    EXPECT_EQ(EditDistance(x, x), 0u);
    EXPECT_LE(EditDistance(x, z), EditDistance(x, y) + EditDistance(y, z));
    EXPECT_LE(EditDistance(x, y), std::max(x.size(), y.size()));
  }
}

}  // namespace
}  // namespace dualvoice
