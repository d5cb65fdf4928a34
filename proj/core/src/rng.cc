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

#include "simask/rng.h"

#include <cmath>
#include <numbers>

#include "simask/error.h"

namespace simask {

double Rng::UniformDouble() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::UniformInt(std::uint64_t n) {
  if (n == 0) ThrowInvalid("UniformInt requires n > 0");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t word = engine_();
    if (word >= threshold) return word % n;
  }
}

double Rng::Normal() {
  const double u1 = 1.0 - UniformDouble();  // (0, 1]
  const double u2 = UniformDouble();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace simask
