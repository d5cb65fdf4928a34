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

#ifndef SIMASK_SYNTH_H_
#define SIMASK_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "simask/pipeline.h"
#include "simask/tensor.h"

namespace simask {

// Synthetic data description. Feature vectors of a pixel are its owner's
// cluster mean plus isotropic Gaussian noise, then normalized.
struct SynthSpec {
  std::size_t num_classes = 2;
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t dim = 16;
  double noise = 0.05;
  std::size_t num_batches = 20;
  std::size_t images_per_batch = 4;
  std::size_t min_instances = 2;
  std::size_t max_instances = 4;
  std::size_t positives_per_instance = 5;
  // Chance that a new instance is placed next to an earlier one of the same
  // class, and that a positive of such an instance spills onto it.
  double neighbor_prob = 0.5;
  double spill_prob = 0.3;
  // Unit vectors; empty means the standard basis e_c for class c and e_C
  // for the background.
  std::vector<std::vector<float>> class_means;
  std::vector<float> background_mean;
};

// Throws Error(kConfig) when a mean is not unit length (1e-5), the mean
// count or dimension disagrees with the spec, or the spec has more classes
// than `max_classes`.
void ValidateSynthSpec(const SynthSpec& spec, std::size_t max_classes);

SynthSpec ParseSynthSpec(const std::string& json_text);
SynthSpec LoadSynthSpec(const std::filesystem::path& path);

struct SynthImage {
  ImageInput input;
  std::vector<Tensor> gt_masks;        // visible ground-truth masks
  std::vector<double> positive_ious;   // box IoU of each positive with its gt
};

struct SynthBatch {
  std::vector<SynthImage> images;
};

// Batch `index` of the stream for `seed`. Each batch draws from its own
// generator seeded from (seed, index), so batches are reproducible alone.
SynthBatch GenerateSynthBatch(const SynthSpec& spec, std::uint64_t seed,
                              std::size_t index);

BatchInput ToBatchInput(const SynthBatch& batch);

// <dir>/<image id>/ in the dataset layout plus gt_<k>.tnsr files.
void WriteSynthBatch(const SynthBatch& batch, const std::filesystem::path& dir);
std::vector<Tensor> ReadGroundTruth(const std::filesystem::path& image_dir);

}  // namespace simask

#endif  // SIMASK_SYNTH_H_
