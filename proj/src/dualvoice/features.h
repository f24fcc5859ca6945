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

#ifndef DUALVOICE_FEATURES_H_
#define DUALVOICE_FEATURES_H_

#include <cstddef>
#include <span>
#include <vector>

namespace dualvoice {

// Row-major frames of equal dimension.
class FeatureSequence {
 public:
  FeatureSequence() = default;
  FeatureSequence(std::size_t frames, std::size_t dim)
      : dim_(dim), data_(frames * dim, 0.0) {}

  std::size_t dim() const { return dim_; }
  std::size_t frame_count() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }

  std::span<double> frame(std::size_t i) {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const double> frame(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace dualvoice

#endif  // DUALVOICE_FEATURES_H_
