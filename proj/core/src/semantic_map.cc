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

#include "simask/semantic_map.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "simask/error.h"

namespace simask {

float SemanticProbability(double best_cosine, double tau) {
  const double p = 1.0 / (1.0 + std::exp(-best_cosine / tau));
  constexpr float kLow = std::numeric_limits<float>::min();
  const float high = std::nextafter(1.0f, 0.0f);
  return std::clamp(static_cast<float>(p), kLow, high);
}

SemanticMap SemanticProbMap(const FeatureMap& fm, const PrototypeBank& bank,
                            int class_id, double tau) {
  if (!(tau > 0.0)) ThrowInvalid("temperature tau must be positive");
  if (!fm.normalized()) ThrowInvalid("semantic map needs a normalized feature map");
  if (class_id < 0 || static_cast<std::size_t>(class_id) >= bank.num_classes()) {
    ThrowInvalid("class id " + std::to_string(class_id) + " out of range");
  }
  const auto c = static_cast<std::size_t>(class_id);
  if (!bank.initialized(c)) {
    ThrowInvalid("class " + std::to_string(class_id) + " has no prototypes yet");
  }
  if (fm.depth() != bank.dim()) ThrowInvalid("feature depth does not match bank");

  SemanticMap out{Tensor::Zeros({fm.height(), fm.width()}), class_id, tau};
  std::span<float> probs = out.probs.mutable_data();
  for (std::size_t i = 0; i < fm.num_pixels(); ++i) {
    const auto z = fm.pixel(i);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < bank.num_subcenters(); ++l) {
      best = std::max(best, Dot(z, bank.prototype(c, l)));
    }
    probs[i] = SemanticProbability(best, tau);
  }
  return out;
}

std::vector<SemanticMapPtr> AssignToInstances(
    const std::map<int, SemanticMapPtr>& maps, std::span<const int> labels,
    std::size_t num_classes) {
  std::vector<SemanticMapPtr> out;
  out.reserve(labels.size());
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      ThrowInvalid("unknown class id " + std::to_string(label));
    }
    const auto it = maps.find(label);
    out.push_back(it == maps.end() ? nullptr : it->second);
  }
  return out;
}

}  // namespace simask
