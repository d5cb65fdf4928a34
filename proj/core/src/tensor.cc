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

#include "simask/tensor.h"

#include <cmath>
#include <cstring>
#include <string>
#include <utility>

#include "simask/error.h"

namespace simask {

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor() : data_(1, 0.0f) {}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != NumElements(shape_)) {
    ThrowInvalid("payload length mismatch: shape holds " +
                 std::to_string(NumElements(shape_)) + " values, got " +
                 std::to_string(data_.size()));
  }
  CheckFinite();
}

Tensor Tensor::Zeros(Shape shape) { return Filled(std::move(shape), 0.0f); }

Tensor Tensor::Filled(Shape shape, float value) {
  const std::size_t n = NumElements(shape);
  return Tensor(std::move(shape), std::vector<float>(n, value));
}

void Tensor::CheckFinite() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw Error(ErrorCategory::kFormat,
                  "non-finite value at index " + std::to_string(i));
    }
  }
}

bool operator==(const Tensor& a, const Tensor& b) {
  return a.shape_ == b.shape_ && a.data_ == b.data_;
}

bool BitIdentical(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  if (a.size() == 0) return true;
  return std::memcmp(a.data().data(), b.data().data(),
                     a.size() * sizeof(float)) == 0;
}

}  // namespace simask
