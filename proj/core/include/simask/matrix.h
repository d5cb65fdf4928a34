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

#ifndef SIMASK_MATRIX_H_
#define SIMASK_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

namespace simask {

// Minimal row-major dense matrix used for score and transport matrices
// (double) and gathered feature rows (float).
template <typename T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  T operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  T& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const T> row(std::size_t r) const {
    return std::span<const T>(values_).subspan(r * cols_, cols_);
  }
  std::span<T> row(std::size_t r) {
    return std::span<T>(values_).subspan(r * cols_, cols_);
  }

  void AppendRow(std::span<const T> values) {
    values_.insert(values_.end(), values.begin(), values.end());
    ++rows_;
  }

  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> values_;
};

using Matrix = DenseMatrix<double>;
using FeatureRows = DenseMatrix<float>;

}  // namespace simask

#endif  // SIMASK_MATRIX_H_
