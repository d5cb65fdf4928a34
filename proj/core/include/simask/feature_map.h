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

#ifndef SIMASK_FEATURE_MAP_H_
#define SIMASK_FEATURE_MAP_H_

#include <cstddef>
#include <span>
#include <vector>

#include "simask/tensor.h"

namespace simask {

// H x W x D dense features. After L2Normalize every non-zero pixel vector is
// unit length; all-zero pixels stay zero and are listed in zero_pixels().
class FeatureMap {
 public:
  // Empty 0 x 0 x 0 map.
  FeatureMap() : tensor_(Tensor::Zeros({0, 0, 0})) {}
  explicit FeatureMap(Tensor tensor);

  const Tensor& tensor() const { return tensor_; }
  std::size_t height() const { return tensor_.dim(0); }
  std::size_t width() const { return tensor_.dim(1); }
  std::size_t depth() const { return tensor_.dim(2); }
  std::size_t num_pixels() const { return height() * width(); }

  bool normalized() const { return normalized_; }
  // Flat pixel indices (h * W + w) whose vectors were all zero.
  const std::vector<std::size_t>& zero_pixels() const { return zero_pixels_; }

  std::span<const float> pixel(std::size_t index) const {
    return tensor_.data().subspan(index * depth(), depth());
  }

 private:
  friend FeatureMap L2Normalize(const FeatureMap& fm);

  Tensor tensor_;
  bool normalized_ = false;
  std::vector<std::size_t> zero_pixels_;
};

FeatureMap L2Normalize(const FeatureMap& fm);

// Dot product with a 64-bit accumulator.
double Dot(std::span<const float> a, std::span<const float> b);

}  // namespace simask

#endif  // SIMASK_FEATURE_MAP_H_
