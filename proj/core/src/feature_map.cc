// Copyright 2026 The simask Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "simask/feature_map.h"

#include <cmath>
#include <string>
#include <utility>

#include "simask/error.h"

namespace simask {

FeatureMap::FeatureMap(Tensor tensor) : tensor_(std::move(tensor)) {
  if (tensor_.rank() != 3) {
    ThrowInvalid("feature map must be H x W x D, got rank " +
                 std::to_string(tensor_.rank()));
  }
}

double Dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

FeatureMap L2Normalize(const FeatureMap& fm) {
  FeatureMap out = fm;
  out.zero_pixels_.clear();
  const std::size_t depth = fm.depth();
  std::span<float> data = out.tensor_.mutable_data();
  for (std::size_t i = 0; i < fm.num_pixels(); ++i) {
    std::span<float> v = data.subspan(i * depth, depth);
    const double norm = std::sqrt(Dot(v, v));
    if (norm == 0.0) {
      out.zero_pixels_.push_back(i);
      continue;
    }
    for (float& x : v) x = static_cast<float>(x / norm);
  }
  out.normalized_ = true;
  return out;
}

}  // namespace simask
