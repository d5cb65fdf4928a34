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

#ifndef SIMASK_INSTANCE_FUSION_H_
#define SIMASK_INSTANCE_FUSION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simask/box.h"
#include "simask/semantic_map.h"
#include "simask/tensor.h"

namespace simask {

// One positive anchor's mask prediction for a ground-truth instance.
struct PositiveSample {
  std::string anchor_id;
  std::size_t gt_instance = 0;
  Tensor pred_mask;            // H x W, values in [0, 1]
  std::optional<Box> pred_box; // derived from pred_mask when absent
};

// Pseudo label for one instance. weight is 0 exactly where
// tau_low < prob < tau_high; hard is 1 where prob >= tau_high.
struct PseudoLabel {
  Tensor prob;
  Tensor hard;
  Tensor weight;
};

// The sample's predicted box, or the tight box of pred_mask >= 0.5.
std::optional<Box> EffectivePredBox(const PositiveSample& sample);

// IoU of each sample's effective predicted box with gt_box (0 when a sample
// has no predicted foreground at all).
std::vector<double> SampleIous(std::span<const PositiveSample> samples,
                               const Box& gt_box);

// w_j = exp(mu * iou_j) / sum_k exp(mu * iou_k), evaluated with the maximum
// exponent subtracted. Throws on an empty list.
std::vector<double> PositiveWeights(std::span<const double> ious, double mu);

// M_I = sum_j w_j * pred_mask_j, clamped to [0, 1] against rounding.
Tensor InstanceProbMap(std::span<const PositiveSample> samples,
                       std::span<const double> weights);

// (1 - alpha) * M_S + alpha * M_I. A null semantic map (class still warming
// up) yields M_I unchanged. Throws for alpha outside [0, 1].
Tensor Fuse(const SemanticMap* semantic, const Tensor& instance, double alpha);

// Zeroes every pixel outside the box.
Tensor RestrictToBox(const Tensor& map, const Box& box);

// Dual-threshold selection. Throws unless 0 <= tau_low <= tau_high <= 1.
PseudoLabel ThresholdSelect(const Tensor& prob, double tau_low,
                            double tau_high);

}  // namespace simask

#endif  // SIMASK_INSTANCE_FUSION_H_
