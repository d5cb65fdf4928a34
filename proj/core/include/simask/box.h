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

#ifndef SIMASK_BOX_H_
#define SIMASK_BOX_H_

#include <cstddef>
#include <optional>

#include "simask/tensor.h"

namespace simask {

// Axis-aligned box in pixel units. Pixel (h, w) covers [w, w+1) x [h, h+1),
// so the box [0, 0, 2, 2] holds exactly the four pixels with h, w in {0, 1}.
// A pixel is inside a box when its center lies in [x0, x1) x [y0, y1).
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }

  bool Contains(std::size_t h, std::size_t w) const {
    const double cx = static_cast<double>(w) + 0.5;
    const double cy = static_cast<double>(h) + 0.5;
    return cx >= x0 && cx < x1 && cy >= y0 && cy < y1;
  }

  // Clamped to [0, width] x [0, height]; inverted coordinates collapse.
  Box Clamped(std::size_t height, std::size_t width) const;

  friend bool operator==(const Box&, const Box&) = default;
};

// Throws unless x0 <= x1 and y0 <= y1 and all coordinates are finite.
void ValidateBox(const Box& box);

// Intersection over union; 0 when the union is empty.
double BoxIou(const Box& a, const Box& b);

// Tightest box around pixels of an H x W map with value >= threshold, or
// nullopt when no pixel qualifies.
std::optional<Box> TightBox(const Tensor& mask, float threshold = 0.5f);

// H x W map that is 1 inside the box and 0 elsewhere.
Tensor BoxIndicator(const Box& box, std::size_t height, std::size_t width);

}  // namespace simask

#endif  // SIMASK_BOX_H_
