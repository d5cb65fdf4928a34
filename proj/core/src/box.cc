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

#include "simask/box.h"

#include <algorithm>
#include <cmath>

#include "simask/error.h"

namespace simask {

Box Box::Clamped(std::size_t height, std::size_t width) const {
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);
  Box out{std::clamp(x0, 0.0, w), std::clamp(y0, 0.0, h),
          std::clamp(x1, 0.0, w), std::clamp(y1, 0.0, h)};
  out.x1 = std::max(out.x1, out.x0);
  out.y1 = std::max(out.y1, out.y0);
  return out;
}

void ValidateBox(const Box& box) {
  if (!std::isfinite(box.x0) || !std::isfinite(box.y0) ||
      !std::isfinite(box.x1) || !std::isfinite(box.y1) || box.x0 > box.x1 ||
      box.y0 > box.y1) {
    ThrowInvalid("invalid box");
  }
}

double BoxIou(const Box& a, const Box& b) {
  const double iw = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double ih = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::optional<Box> TightBox(const Tensor& mask, float threshold) {
  const std::size_t height = mask.dim(0);
  const std::size_t width = mask.dim(1);
  std::size_t h0 = height, h1 = 0, w0 = width, w1 = 0;
  bool any = false;
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      if (mask.at(h, w) >= threshold) {
        any = true;
        h0 = std::min(h0, h);
        h1 = std::max(h1, h);
        w0 = std::min(w0, w);
        w1 = std::max(w1, w);
      }
    }
  }
  if (!any) return std::nullopt;
  return Box{static_cast<double>(w0), static_cast<double>(h0),
             static_cast<double>(w1 + 1), static_cast<double>(h1 + 1)};
}

Tensor BoxIndicator(const Box& box, std::size_t height, std::size_t width) {
  Tensor out = Tensor::Zeros({height, width});
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      if (box.Contains(h, w)) out.at(h, w) = 1.0f;
    }
  }
  return out;
}

}  // namespace simask
