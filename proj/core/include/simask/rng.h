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

#ifndef SIMASK_RNG_H_
#define SIMASK_RNG_H_

#include <cstdint>
#include <random>

namespace simask {

// Deterministic generator with a platform-independent output sequence.
//
// The engine is std::mt19937_64, whose raw sequence is fixed by the C++
// standard. The standard library distributions are implementation-defined,
// so every derived draw is computed here from raw 64-bit words:
//   UniformDouble  = (word >> 11) * 2^-53, in [0, 1)
//   UniformInt(n)  = word % n, rejecting words below (2^64 - n) % n
//   Normal         = Box-Muller over two UniformDouble draws, one word pair
//                    per returned value (the second variate is discarded)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextWord() { return engine_(); }
  double UniformDouble();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * UniformDouble(); }
  // Uniform over {0, ..., n - 1}; n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);
  double Normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace simask

#endif  // SIMASK_RNG_H_
