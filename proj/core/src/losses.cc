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

#include "simask/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "simask/error.h"

namespace simask {
namespace {

void CheckAligned(std::span<const double> pred, std::span<const double> target,
                  std::span<const double> weight) {
  if (pred.size() != target.size() || pred.size() != weight.size()) {
    ThrowInvalid("loss: pred, target and weight differ in size");
  }
}

double WeightSum(std::span<const double> weight) {
  double total = 0.0;
  for (double w : weight) total += w;
  if (total <= 0.0) ThrowInvalid("loss: weight mask ignores every pixel");
  return total;
}

}  // namespace

std::vector<double> ToDouble(const Tensor& t) {
  return std::vector<double>(t.data().begin(), t.data().end());
}

LossValue BceLoss(std::span<const double> pred, std::span<const double> target,
                  std::span<const double> weight) {
  CheckAligned(pred, target, weight);
  const double count = WeightSum(weight);
  LossValue out{0.0, std::vector<double>(pred.size(), 0.0)};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (weight[i] == 0.0) continue;
    const double p = std::clamp(pred[i], kBceClamp, 1.0 - kBceClamp);
    const double t = target[i];
    out.value -= weight[i] * (t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
    // The clamp is flat outside its range.
    if (pred[i] > kBceClamp && pred[i] < 1.0 - kBceClamp) {
      out.grad[i] = weight[i] * (p - t) / (p * (1.0 - p)) / count;
    }
  }
  out.value /= count;
  return out;
}

LossValue DiceLoss(std::span<const double> pred, std::span<const double> target,
                   std::span<const double> weight) {
  CheckAligned(pred, target, weight);
  WeightSum(weight);
  double overlap = 0.0;
  double pred_sq = 0.0;
  double target_sq = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    overlap += weight[i] * pred[i] * target[i];
    pred_sq += weight[i] * pred[i] * pred[i];
    target_sq += weight[i] * target[i] * target[i];
  }
  const double denom = pred_sq + target_sq + kDiceEps;
  LossValue out{1.0 - 2.0 * overlap / denom,
                std::vector<double>(pred.size(), 0.0)};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (weight[i] == 0.0) continue;
    out.grad[i] = -2.0 * weight[i] *
                  (target[i] * denom - 2.0 * overlap * pred[i]) /
                  (denom * denom);
  }
  return out;
}

LossValue MaskLoss(std::span<const double> pred, std::span<const double> target,
                   std::span<const double> weight) {
  LossValue bce = BceLoss(pred, target, weight);
  const LossValue dice = DiceLoss(pred, target, weight);
  bce.value += dice.value;
  for (std::size_t i = 0; i < bce.grad.size(); ++i) bce.grad[i] += dice.grad[i];
  return bce;
}

BatchLossValue PseudoMaskLoss(std::span<const Tensor> preds,
                              std::span<const PseudoLabel> labels,
                              std::span<const std::size_t> label_index) {
  if (preds.size() != label_index.size()) {
    ThrowInvalid("pseudo loss: every positive needs a label index");
  }
  BatchLossValue out;
  out.grads.resize(preds.size());
  if (preds.empty()) return out;
  const double scale = 1.0 / static_cast<double>(preds.size());
  for (std::size_t j = 0; j < preds.size(); ++j) {
    if (label_index[j] >= labels.size()) {
      ThrowInvalid("pseudo loss: positive " + std::to_string(j) +
                   " references a missing instance");
    }
    const PseudoLabel& label = labels[label_index[j]];
    if (label.hard.shape() != preds[j].shape()) {
      ThrowInvalid("pseudo loss: prediction and pseudo label differ in shape");
    }
    const std::vector<double> weight = ToDouble(label.weight);
    if (std::all_of(weight.begin(), weight.end(), [](double w) { return w == 0.0; })) {
      out.grads[j].assign(preds[j].size(), 0.0);
      continue;
    }
    LossValue loss = MaskLoss(ToDouble(preds[j]), ToDouble(label.hard), weight);
    out.value += scale * loss.value;
    for (double& g : loss.grad) g *= scale;
    out.grads[j] = std::move(loss.grad);
  }
  return out;
}

BatchLossValue PasteLoss(std::span<const Tensor> preds,
                         std::span<const Tensor> pasted_masks,
                         std::span<const bool> paste_flags) {
  if (preds.size() != pasted_masks.size() || preds.size() != paste_flags.size()) {
    ThrowInvalid("paste loss: preds, masks and flags are not aligned");
  }
  BatchLossValue out;
  out.grads.resize(preds.size());
  for (std::size_t k = 0; k < preds.size(); ++k) {
    if (!paste_flags[k]) {
      out.grads[k].assign(preds[k].size(), 0.0);
      continue;
    }
    if (preds[k].shape() != pasted_masks[k].shape()) {
      ThrowInvalid("paste loss: prediction and pasted mask differ in shape");
    }
    const std::vector<double> ones(preds[k].size(), 1.0);
    LossValue loss = MaskLoss(ToDouble(preds[k]), ToDouble(pasted_masks[k]), ones);
    out.value += loss.value;
    out.grads[k] = std::move(loss.grad);
  }
  return out;
}

double TotalLoss(double lowlevel, double pseudo, double paste, double lambda1,
                 double lambda2) {
  return lowlevel + lambda1 * pseudo + lambda2 * paste;
}

}  // namespace simask
