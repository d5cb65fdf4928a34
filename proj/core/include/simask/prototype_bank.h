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

#ifndef SIMASK_PROTOTYPE_BANK_H_
#define SIMASK_PROTOTYPE_BANK_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "simask/box.h"
#include "simask/feature_map.h"
#include "simask/matrix.h"
#include "simask/sinkhorn.h"
#include "simask/tensor.h"

namespace simask {

// Per-class sub-center prototypes (C x L x D), updated by momentum.
//
// A sub-center row is "set" once it has received a centroid. The first
// centroid is copied in verbatim; later ones are blended with momentum gamma
// and the row is re-normalized. A class is initialized once all of its L rows
// are set; only initialized classes produce semantic maps.
//
// Writers must be serialized. Readers should take a copy at batch start.
class PrototypeBank {
 public:
  PrototypeBank(std::size_t num_classes, std::size_t num_subcenters,
                std::size_t dim, double gamma);

  // Rebuilds a bank from checkpoint parts; validates shapes and unit norms.
  static PrototypeBank FromState(Tensor prototypes, std::vector<bool> rows_set,
                                 double gamma, std::uint64_t update_count);

  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_subcenters() const { return num_subcenters_; }
  std::size_t dim() const { return dim_; }
  double gamma() const { return gamma_; }
  std::uint64_t update_count() const { return update_count_; }
  void set_update_count(std::uint64_t n) { update_count_ = n; }

  bool initialized(std::size_t class_id) const;
  bool row_set(std::size_t class_id, std::size_t subcenter) const;
  const std::vector<bool>& rows_set() const { return rows_set_; }

  std::span<const float> prototype(std::size_t class_id,
                                   std::size_t subcenter) const;
  const Tensor& prototypes() const { return prototypes_; }

  // Applies one momentum step to class_id. Rows with count 0 are untouched.
  void EmaUpdate(std::size_t class_id, const FeatureRows& centroids,
                 std::span<const std::size_t> counts);

 private:
  void CheckClass(std::size_t class_id) const;

  std::size_t num_classes_;
  std::size_t num_subcenters_;
  std::size_t dim_;
  double gamma_;
  std::uint64_t update_count_ = 0;
  Tensor prototypes_;
  std::vector<bool> rows_set_;  // C * L
};

// gamma * p_old + (1 - gamma) * centroid, before re-normalization.
std::vector<double> EmaStep(std::span<const float> p_old,
                            std::span<const float> centroid, double gamma);

// One instance annotation as used by the bank and the fusion stages.
struct Instance {
  int class_id = 0;
  Box box;
};

// Features of pixels inside any box of class_id that are foreground in that
// instance's hard mask. Pixels shared by overlapping instances appear once,
// in row-major pixel order.
FeatureRows GatherClassPixels(const FeatureMap& fm,
                              std::span<const Instance> instances,
                              std::span<const Tensor> hard_masks,
                              int class_id);

// Scores S = P^T Z, an L x N matrix of prototype/pixel dot products.
Matrix PrototypeScores(const FeatureRows& prototypes,
                       const FeatureRows& features);

// Prototypes used to score class_id's pixels. Set rows come from the bank;
// unset rows of a class that is still warming up are seeded with the pixel
// features at evenly spaced indices floor((l + 0.5) * N / L).
FeatureRows ScoringPrototypes(const PrototypeBank& bank, std::size_t class_id,
                              const FeatureRows& features);

struct Subcenters {
  FeatureRows centroids;            // L x D, unit rows where counts > 0
  std::vector<std::size_t> counts;  // pixels per sub-center
};

// Mean of the features assigned to each sub-center, unit-normalized.
// Sub-centers with no pixels (or a zero mean) get count 0 and a zero row.
Subcenters ComputeSubcenters(const FeatureRows& features,
                             std::span<const std::size_t> assignment,
                             std::size_t num_subcenters);

// Sinkhorn assignment plus sub-center extraction for one class in one image.
struct ClassUpdate {
  std::size_t class_id = 0;
  std::size_t num_pixels = 0;
  Subcenters subcenters;
  bool converged = true;
  double max_violation = 0.0;
};

ClassUpdate ComputeClassUpdate(const PrototypeBank& bank, std::size_t class_id,
                               const FeatureRows& features,
                               const SinkhornOptions& options);

// Checkpoint: <dir>/prototypes.tnsr (C x L x D) and <dir>/bank.json with
// {"initialized":[...],"gamma":...,"update_count":...,"rows_set":[[...]]}.
void SavePrototypeBank(const PrototypeBank& bank,
                       const std::filesystem::path& dir);
PrototypeBank LoadPrototypeBank(const std::filesystem::path& dir);

}  // namespace simask

#endif  // SIMASK_PROTOTYPE_BANK_H_
