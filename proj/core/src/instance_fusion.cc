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

#include "simask/instance_fusion.h"

#include <algorithm>
#include <cmath>

#include "simask/error.h"

namespace simask {

std::optional<Box> EffectivePredBox(const PositiveSample& sample) {
  if (sample.pred_box) return sample.pred_box;
  return TightBox(sample.pred_mask, 0.5f);
}

std::vector<double> SampleIous(std::span<const PositiveSample> samples,
                               const Box& gt_box) {
  std::vector<double> ious;
  ious.reserve(samples.size());
  for (const auto& sample : samples) {
    const auto box = EffectivePredBox(sample);
    ious.push_back(box ? BoxIou(*box, gt_box) : 0.0);
  }
  return ious;
}

std::vector<double> PositiveWeights(std::span<const double> ious, double mu) {
  if (ious.empty()) ThrowInvalid("positive weights need at least one sample");
  double peak = mu * ious[0];
  for (double iou : ious) peak = std::max(peak, mu * iou);
  std::vector<double> weights(ious.size());
  double total = 0.0;
  for (std::size_t j = 0; j < ious.size(); ++j) {
    weights[j] = std::exp(mu * ious[j] - peak);
    total += weights[j];
  }
  for (double& w : weights) w /= total;
  return weights;
}

Tensor InstanceProbMap(std::span<const PositiveSample> samples,
                       std::span<const double> weights) {
  if (samples.empty() || samples.size() != weights.size()) {
    ThrowInvalid("instance map: samples and weights must be non-empty and aligned");
  }
  const Shape& shape = samples[0].pred_mask.shape();
  if (shape.size() != 2) ThrowInvalid("instance map: masks must be H x W");
  std::vector<double> acc(NumElements(shape), 0.0);
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const Tensor& mask = samples[j].pred_mask;
    if (mask.shape() != shape) ThrowInvalid("instance map: mask shape mismatch");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weights[j] * mask[i];
  }
  Tensor out = Tensor::Zeros(shape);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out[i] = static_cast<float>(std::clamp(acc[i], 0.0, 1.0));
  }
  return out;
}

Tensor Fuse(const SemanticMap* semantic, const Tensor& instance, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) ThrowInvalid("alpha must lie in [0, 1]");
  if (semantic == nullptr) return instance;
  if (semantic->probs.shape() != instance.shape()) {
    ThrowInvalid("fuse: semantic and instance maps differ in shape");
  }
  Tensor out = Tensor::Zeros(instance.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>((1.0 - alpha) * semantic->probs[i] +
                                alpha * instance[i]);
  }
  return out;
}

Tensor RestrictToBox(const Tensor& map, const Box& box) {
  Tensor out = map;
  for (std::size_t h = 0; h < map.dim(0); ++h) {
    for (std::size_t w = 0; w < map.dim(1); ++w) {
      if (!box.Contains(h, w)) out.at(h, w) = 0.0f;
    }
  }
  return out;
}

PseudoLabel ThresholdSelect(const Tensor& prob, double tau_low,
                            double tau_high) {
  if (!(0.0 <= tau_low && tau_low <= tau_high && tau_high <= 1.0)) {
    ThrowInvalid("thresholds must satisfy 0 <= tau_low <= tau_high <= 1");
  }
  PseudoLabel label{prob, Tensor::Zeros(prob.shape()),
                    Tensor::Zeros(prob.shape())};
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double p = prob[i];
    if (p >= tau_high) {
      label.hard[i] = 1.0f;
      label.weight[i] = 1.0f;
    } else if (p <= tau_low) {
      label.weight[i] = 1.0f;
    }
  }
  return label;
}

}  // namespace simask
