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

#ifndef SIMASK_PIPELINE_H_
#define SIMASK_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simask/config.h"
#include "simask/copy_paste.h"
#include "simask/feature_map.h"
#include "simask/instance_fusion.h"
#include "simask/prototype_bank.h"
#include "simask/semantic_map.h"
#include "simask/tensor.h"

namespace simask {

// One training image with its box annotations and the mask predictions of
// the positive anchors assigned to each box.
struct ImageInput {
  std::string id;
  Tensor image;          // H x W x 3, sRGB in [0, 1]
  FeatureMap features;   // H x W x D, L2-normalized
  std::vector<Instance> instances;
  std::vector<PositiveSample> positives;

  // Instances that were pasted by Copy-Paste, with their pasted masks as
  // targets for the paste loss. Empty vectors mean nothing was pasted.
  std::vector<bool> pasted;
  std::vector<Tensor> paste_masks;

  // "online" or "momentum": which network produced the positive masks.
  std::string prediction_source = "online";
  // Low-level loss supplied from outside; used when the built-in one is off.
  std::optional<double> external_lowlevel;
};

struct BatchInput {
  std::vector<ImageInput> images;
};

// Throws Error(kInvalidArgument) naming the image when shapes disagree,
// a positive references a missing instance or a box is invalid.
void ValidateImageInput(const ImageInput& image, std::size_t num_classes);

struct InstanceResult {
  PseudoLabel label;
  std::optional<Tensor> instance_map;  // absent when the box has no positives
  bool semantic_used = false;
  double importance = 0.0;
};

struct LossReport {
  std::string image;
  double lowlevel = 0.0;
  double pseudo = 0.0;
  double paste = 0.0;
  double lambda1 = 0.0;  // effective values after warm-up gating
  double lambda2 = 0.0;
  double total = 0.0;
};

struct ImageResult {
  std::string id;
  std::vector<InstanceResult> instances;
  std::map<int, SemanticMapPtr> semantic_maps;
  LossReport loss;
  std::vector<ClassUpdate> class_updates;
};

struct BatchResult {
  std::vector<ImageResult> images;
};

// Per image, against a snapshot of the bank: semantic maps for initialized
// classes, per-instance IoU-weighted maps, fusion, restriction to the box,
// dual thresholding, losses, then class pixel gathering with Sinkhorn
// sub-center assignment. After all images are done, the EMA updates are
// applied in image order and then in class order, and the bank's
// update_count advances by one. Results do not depend on `workers`.
BatchResult GeneratePseudoLabels(const BatchInput& batch, PrototypeBank& bank,
                                 const Config& config, int workers = 1);

// Single image against a fixed bank; no bank mutation.
ImageResult ProcessImage(const ImageInput& image, const PrototypeBank& bank,
                         const Config& config);

// Loss report for one image from its pseudo labels (one per instance).
// Instance maps for the paste loss are rebuilt from the positives; `step`
// selects the warm-up gating of lambda1 and lambda2.
LossReport ComputeLossReport(const ImageInput& image,
                             std::span<const PseudoLabel> labels,
                             const Config& config, std::uint64_t step);

// Memory-bank entry built from an image and its pseudo labels.
MemoryBankEntry MakeMemoryEntry(const ImageInput& image,
                                const ImageResult& result);

// Mask IoU of hard {0, 1} maps; 1 when both are empty.
double MaskIou(const Tensor& a, const Tensor& b);

}  // namespace simask

#endif  // SIMASK_PIPELINE_H_
