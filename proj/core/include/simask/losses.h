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

#ifndef SIMASK_LOSSES_H_
#define SIMASK_LOSSES_H_

#include <cstddef>
#include <span>
#include <vector>

#include "simask/box.h"
#include "simask/instance_fusion.h"
#include "simask/tensor.h"

namespace simask {

// Loss value and d(loss)/d(pred) for one prediction map. Losses run in
// double precision so that gradients can be checked by finite differences.
struct LossValue {
  double value = 0.0;
  std::vector<double> grad;
};

// Loss over several prediction maps; grads[j] belongs to preds[j].
struct BatchLossValue {
  double value = 0.0;
  std::vector<std::vector<double>> grads;
};

constexpr double kBceClamp = 1e-7;
constexpr double kDiceEps = 1e-6;

std::vector<double> ToDouble(const Tensor& t);

// Mean over weighted pixels of -[t log p + (1 - t) log(1 - p)] with p clamped
// to [1e-7, 1 - 1e-7]. Throws when every weight is zero.
LossValue BceLoss(std::span<const double> pred, std::span<const double> target,
                  std::span<const double> weight);

// 1 - 2 sum(w p t) / (sum(w p^2) + sum(w t^2) + 1e-6).
// Throws when every weight is zero.
LossValue DiceLoss(std::span<const double> pred, std::span<const double> target,
                   std::span<const double> weight);

// BCE + Dice.
LossValue MaskLoss(std::span<const double> pred, std::span<const double> target,
                   std::span<const double> weight);

// Mean over positives j of MaskLoss(preds[j], labels[label_index[j]].hard,
// labels[label_index[j]].weight). A positive whose weight mask is entirely
// zero contributes 0 with a zero gradient but still counts toward the mean.
// No positives gives 0.
BatchLossValue PseudoMaskLoss(std::span<const Tensor> preds,
                              std::span<const PseudoLabel> labels,
                              std::span<const std::size_t> label_index);

// Sum (not mean) over flagged instances of MaskLoss(preds[k], masks[k], 1).
// Unflagged instances get a zero gradient.
BatchLossValue PasteLoss(std::span<const Tensor> preds,
                         std::span<const Tensor> pasted_masks,
                         std::span<const bool> paste_flags);

// Box-supervised projection + pairwise terms. These reproduce the usual
// box-projection and color-affinity losses; their exact constants are
// choices of this library:
//   projection: Dice (as above, full weights) between the column-wise and
//     row-wise max-projections of pred and of the box indicator, summed.
//     Zero when the box covers no pixel.
//   pairwise: mean over 8-neighbour edges with both ends inside the box
//     grown by `dilation` pixels and color similarity
//     exp(-||Lab_a - Lab_b|| / sigma) >= theta of
//     -log(p_a p_b + (1 - p_a)(1 - p_b)). Zero when no edge qualifies.
struct LowLevelOptions {
  double theta = 0.3;
  double sigma = 2.0;
  int dilation = 1;
};

struct LowLevelLossValue {
  double value = 0.0;
  double projection = 0.0;
  double pairwise = 0.0;
  std::size_t num_edges = 0;
  std::vector<double> grad;
};

// pred is H x W (row-major), image is H x W x 3 with sRGB values in [0, 1].
LowLevelLossValue LowLevelLoss(std::span<const double> pred, std::size_t height,
                               std::size_t width, const Box& gt_box,
                               const Tensor& image,
                               const LowLevelOptions& options = {});

// sRGB in [0, 1] to CIE Lab (D65).
void SrgbToLab(const float rgb[3], double lab[3]);

// lowlevel + lambda1 * pseudo + lambda2 * paste.
double TotalLoss(double lowlevel, double pseudo, double paste, double lambda1,
                 double lambda2);

}  // namespace simask

#endif  // SIMASK_LOSSES_H_
