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

#ifndef SIMASK_SEMANTIC_MAP_H_
#define SIMASK_SEMANTIC_MAP_H_

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "simask/feature_map.h"
#include "simask/prototype_bank.h"
#include "simask/tensor.h"

namespace simask {

// Full-frame H x W map of sigmoid(max_l <z_i, p_l> / tau) for one class.
// Values are kept strictly inside (0, 1).
struct SemanticMap {
  Tensor probs;
  int class_id = 0;
  double tau = 0.1;
};

using SemanticMapPtr = std::shared_ptr<const SemanticMap>;

// Throws if class_id is not initialized in the bank, tau <= 0, or the
// feature map is not normalized. Zero feature vectors map to 0.5.
SemanticMap SemanticProbMap(const FeatureMap& fm, const PrototypeBank& bank,
                            int class_id, double tau);

// Semantic probability of one pixel given its best cosine similarity.
float SemanticProbability(double best_cosine, double tau);

// Routes class maps to instances by label. Instances whose class has no map
// get nullptr (the class is still warming up). Labels outside
// [0, num_classes) throw.
std::vector<SemanticMapPtr> AssignToInstances(
    const std::map<int, SemanticMapPtr>& maps, std::span<const int> labels,
    std::size_t num_classes);

}  // namespace simask

#endif  // SIMASK_SEMANTIC_MAP_H_
