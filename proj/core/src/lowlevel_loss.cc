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

#include <algorithm>
#include <cmath>

#include "simask/error.h"
#include "simask/losses.h"

namespace simask {
namespace {

constexpr double kMinAgreement = 1e-12;

double SrgbToLinear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double LabF(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta ? std::cbrt(t)
                                      : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

// Dice between two vectors with unit weights; accumulates d/d(pred) into
// grad_out. Same formula as DiceLoss.
double ProjectionDice(std::span<const double> pred, std::span<const double> target,
                      std::vector<double>& grad_out) {
  double overlap = 0.0, pred_sq = 0.0, target_sq = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    overlap += pred[i] * target[i];
    pred_sq += pred[i] * pred[i];
    target_sq += target[i] * target[i];
  }
  const double denom = pred_sq + target_sq + kDiceEps;
  grad_out.assign(pred.size(), 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    grad_out[i] = -2.0 * (target[i] * denom - 2.0 * overlap * pred[i]) /
                  (denom * denom);
  }
  return 1.0 - 2.0 * overlap / denom;
}

}  // namespace

void SrgbToLab(const float rgb[3], double lab[3]) {
  const double r = SrgbToLinear(rgb[0]);
  const double g = SrgbToLinear(rgb[1]);
  const double b = SrgbToLinear(rgb[2]);
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
  const double y = (0.2126729 * r + 0.7151522 * g + 0.0721750 * b);
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
  const double fx = LabF(x), fy = LabF(y), fz = LabF(z);
  lab[0] = 116.0 * fy - 16.0;
  lab[1] = 500.0 * (fx - fy);
  lab[2] = 200.0 * (fy - fz);
}

LowLevelLossValue LowLevelLoss(std::span<const double> pred, std::size_t height,
                               std::size_t width, const Box& gt_box,
                               const Tensor& image,
                               const LowLevelOptions& options) {
  if (pred.size() != height * width) ThrowInvalid("lowlevel: pred is not H x W");
  if (image.shape() != Shape{height, width, 3}) {
    ThrowInvalid("lowlevel: image must be H x W x 3");
  }
  ValidateBox(gt_box);
  LowLevelLossValue out;
  out.grad.assign(pred.size(), 0.0);

  // Projection term.
  const Tensor box_mask = BoxIndicator(gt_box, height, width);
  const bool box_has_pixels =
      std::any_of(box_mask.data().begin(), box_mask.data().end(),
                  [](float v) { return v > 0.0f; });
  if (box_has_pixels) {
    std::vector<double> col_max(width), col_box(width, 0.0);
    std::vector<std::size_t> col_arg(width, 0);
    for (std::size_t w = 0; w < width; ++w) {
      col_max[w] = pred[w];
      for (std::size_t h = 0; h < height; ++h) {
        if (pred[h * width + w] > col_max[w]) {
          col_max[w] = pred[h * width + w];
          col_arg[w] = h;
        }
        col_box[w] = std::max(col_box[w], static_cast<double>(box_mask.at(h, w)));
      }
    }
    std::vector<double> row_max(height), row_box(height, 0.0);
    std::vector<std::size_t> row_arg(height, 0);
    for (std::size_t h = 0; h < height; ++h) {
      row_max[h] = pred[h * width];
      for (std::size_t w = 0; w < width; ++w) {
        if (pred[h * width + w] > row_max[h]) {
          row_max[h] = pred[h * width + w];
          row_arg[h] = w;
        }
        row_box[h] = std::max(row_box[h], static_cast<double>(box_mask.at(h, w)));
      }
    }
    std::vector<double> grad;
    out.projection += ProjectionDice(col_max, col_box, grad);
    for (std::size_t w = 0; w < width; ++w) {
      out.grad[col_arg[w] * width + w] += grad[w];
    }
    out.projection += ProjectionDice(row_max, row_box, grad);
    for (std::size_t h = 0; h < height; ++h) {
      out.grad[h * width + row_arg[h]] += grad[h];
    }
  }

  // Pairwise term.
  const Box grown{gt_box.x0 - options.dilation, gt_box.y0 - options.dilation,
                  gt_box.x1 + options.dilation, gt_box.y1 + options.dilation};
  std::vector<double> lab(height * width * 3);
  for (std::size_t i = 0; i < height * width; ++i) {
    const float rgb[3] = {image[3 * i], image[3 * i + 1], image[3 * i + 2]};
    SrgbToLab(rgb, &lab[3 * i]);
  }
  constexpr int kOffsets[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  std::vector<double> pair_grad(pred.size(), 0.0);
  double pair_sum = 0.0;
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      if (!grown.Contains(h, w)) continue;
      for (const auto& off : kOffsets) {
        const long nh = static_cast<long>(h) + off[0];
        const long nw = static_cast<long>(w) + off[1];
        if (nh < 0 || nw < 0 || nh >= static_cast<long>(height) ||
            nw >= static_cast<long>(width)) {
          continue;
        }
        const auto bh = static_cast<std::size_t>(nh);
        const auto bw = static_cast<std::size_t>(nw);
        if (!grown.Contains(bh, bw)) continue;
        const std::size_t a = h * width + w;
        const std::size_t b = bh * width + bw;
        const double dl = lab[3 * a] - lab[3 * b];
        const double da = lab[3 * a + 1] - lab[3 * b + 1];
        const double db = lab[3 * a + 2] - lab[3 * b + 2];
        const double similarity =
            std::exp(-std::sqrt(dl * dl + da * da + db * db) / options.sigma);
        if (similarity < options.theta) continue;
        ++out.num_edges;
        const double pa = pred[a];
        const double pb = pred[b];
        const double agree = pa * pb + (1.0 - pa) * (1.0 - pb);
        if (agree <= kMinAgreement) {
          pair_sum -= std::log(kMinAgreement);
          continue;
        }
        pair_sum -= std::log(agree);
        pair_grad[a] -= (2.0 * pb - 1.0) / agree;
        pair_grad[b] -= (2.0 * pa - 1.0) / agree;
      }
    }
  }
  if (out.num_edges > 0) {
    const double scale = 1.0 / static_cast<double>(out.num_edges);
    out.pairwise = pair_sum * scale;
    for (std::size_t i = 0; i < pred.size(); ++i) out.grad[i] += pair_grad[i] * scale;
  }
  out.value = out.projection + out.pairwise;
  return out;
}

}  // namespace simask
