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

// Reference implementations used to check the engine. Each is written
// independently of the code it checks and favours clarity over speed.

#ifndef SIMASK_CHECKS_ORACLES_H_
#define SIMASK_CHECKS_ORACLES_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "simask/box.h"
#include "simask/copy_paste.h"
#include "simask/matrix.h"
#include "simask/rng.h"
#include "simask/tensor.h"

namespace simask::checks {

// Plain alternating normalization of K = exp(S / eps) towards uniform
// marginals. Each pass scales rows then columns; passes stop once the
// marginal error measured before a pass is below `stop_tol` or after
// `max_iter` passes. stop_tol = 0 runs exactly max_iter passes.
Matrix NaiveSinkhorn(const Matrix& scores, double epsilon,
                     int max_iter = 1000000, double stop_tol = 1e-14);

// A random plan with uniform marginals: a random positive matrix scaled
// (without any exponential) to the marginals.
Matrix RandomFeasiblePlan(std::size_t rows, std::size_t cols, Rng& rng);

// Central differences of f at x with step h.
std::vector<double> FiniteDifference(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h = 1e-6);

// ||a - b||_2 / max(||b||_2, floor).
double RelativeError(std::span<const double> a, std::span<const double> b,
                     double floor = 1e-12);

using PixelSet = std::set<std::size_t>;

PixelSet ToPixelSet(const Tensor& mask);

// Tight box of a pixel set on a canvas of the given width.
std::optional<Box> SetBox(const PixelSet& pixels, std::size_t width);

// Expected composite for jitter-free pasting: pasted instances keep their
// source pixels; visibility follows target < paste 0 < paste 1 < ...
struct OracleInstance {
  int label = 0;
  bool pasted = false;
  PixelSet pixels;
  Box box;
};
std::vector<OracleInstance> CompositeOracle(const TargetSample& target,
                                            const MemoryBankEntry& source,
                                            std::span<const std::size_t> selected);

// Class pixels as the union over same-class instances of (box ∩ mask).
std::set<std::size_t> GatherOracle(std::size_t height, std::size_t width,
                                   std::span<const int> classes,
                                   std::span<const Box> boxes,
                                   std::span<const Tensor> hard_masks,
                                   int class_id);

// FNV-1a digest, used to compare reruns bit for bit.
class Digest {
 public:
  void Add(const void* data, std::size_t size);
  void Add(double v) { Add(&v, sizeof v); }
  void Add(std::uint64_t v) { Add(&v, sizeof v); }
  void Add(const Tensor& t);
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace simask::checks

#endif  // SIMASK_CHECKS_ORACLES_H_
