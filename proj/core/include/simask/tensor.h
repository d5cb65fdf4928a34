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

#ifndef SIMASK_TENSOR_H_
#define SIMASK_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace simask {

using Shape = std::vector<std::size_t>;

// Number of elements described by `shape`. The empty shape is a scalar.
std::size_t NumElements(const Shape& shape);

// Dense row-major float32 array. Index order for images and feature maps is
// (h, w, d); masks and probability maps are (h, w).
//
// Every constructor validates that the payload length matches the shape and
// that all values are finite.
class Tensor {
 public:
  // Scalar zero.
  Tensor();
  Tensor(Shape shape, std::vector<float> data);

  static Tensor Zeros(Shape shape);
  static Tensor Filled(Shape shape, float value);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }

  float operator[](std::size_t i) const { return data_[i]; }
  float& operator[](std::size_t i) { return data_[i]; }

  // 2-D access for H x W maps.
  float at(std::size_t h, std::size_t w) const {
    return data_[h * shape_[1] + w];
  }
  float& at(std::size_t h, std::size_t w) { return data_[h * shape_[1] + w]; }

  // 3-D access for H x W x D arrays.
  float at(std::size_t h, std::size_t w, std::size_t d) const {
    return data_[(h * shape_[1] + w) * shape_[2] + d];
  }
  float& at(std::size_t h, std::size_t w, std::size_t d) {
    return data_[(h * shape_[1] + w) * shape_[2] + d];
  }

  // Throws if any element is NaN or infinite; the message names the index.
  void CheckFinite() const;

  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  Shape shape_;
  std::vector<float> data_;
};

// Bitwise equality of shape and payload (distinguishes -0.0f from 0.0f).
bool BitIdentical(const Tensor& a, const Tensor& b);

// ".tnsr" file IO. Layout: 8-byte magic "SIMTNSR\0", 4-byte little-endian
// header length, UTF-8 JSON header {"dtype":"f32","shape":[...]}, then the
// little-endian float32 payload with no padding.
Tensor ReadTensor(const std::filesystem::path& path);
void WriteTensor(const Tensor& tensor, const std::filesystem::path& path);

// In-memory variants of the same format.
std::vector<std::uint8_t> EncodeTensor(const Tensor& tensor);
Tensor DecodeTensor(std::span<const std::uint8_t> bytes);

}  // namespace simask

#endif  // SIMASK_TENSOR_H_
