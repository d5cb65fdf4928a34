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

#ifndef SIMASK_CONFIG_H_
#define SIMASK_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "simask/copy_paste.h"
#include "simask/losses.h"
#include "simask/sinkhorn.h"

namespace simask {

struct Config {
  std::size_t num_classes = 0;  // required
  std::size_t num_subcenters = 10;
  double gamma = 0.999;
  double alpha = 0.5;
  double mu = 5.0;
  double tau = 0.1;
  double tau_low = 0.3;
  double tau_high = 0.7;
  double epsilon = 0.05;
  int sinkhorn_max_iter = 100;
  double sinkhorn_tol = 1e-6;
  double lambda1 = 0.5;
  double lambda2 = 1.0;
  std::uint64_t warmup_steps = 0;
  std::size_t bank_capacity = 100;
  std::uint64_t seed = 0;

  // Low-level loss switch and constants; when disabled the per-image
  // "lowlevel" value from annotations.json (or 0) is used instead.
  bool lowlevel_enabled = true;
  double pairwise_theta = 0.3;
  double pairwise_sigma = 2.0;
  bool paste_jitter = true;

  SinkhornOptions sinkhorn() const {
    return {epsilon, sinkhorn_max_iter, sinkhorn_tol};
  }
  LowLevelOptions lowlevel() const {
    return {pairwise_theta, pairwise_sigma, 1};
  }
  PasteOptions paste() const {
    PasteOptions options;
    options.jitter = paste_jitter;
    return options;
  }
};

// Throws Error(kConfig) on out-of-range values.
void ValidateConfig(const Config& config);

// JSON object whose keys are exactly the Config field names; missing keys
// keep their defaults, unknown keys are rejected, and num_classes is
// required.
Config ParseConfig(const std::string& json_text);
Config LoadConfig(const std::filesystem::path& path);
std::string ConfigToJson(const Config& config);

// (lambda1, lambda2) at a given step: zero before warmup_steps.
struct LossWeights {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};
LossWeights EffectiveLossWeights(const Config& config, std::uint64_t step);

}  // namespace simask

#endif  // SIMASK_CONFIG_H_
