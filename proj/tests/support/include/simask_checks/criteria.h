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

// The acceptance suite. Each criterion is a self-contained seeded check that
// reports pass/fail with a one-line detail string.

#ifndef SIMASK_CHECKS_CRITERIA_H_
#define SIMASK_CHECKS_CRITERIA_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace simask::checks {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  // Digest of the criterion's outputs; used by the determinism check.
  std::uint64_t digest = 0;
};

CriterionResult CheckSinkhornMarginals();      // 1
CriterionResult CheckSinkhornOracle();         // 2
CriterionResult CheckEmaContraction();         // 3
CriterionResult CheckPositiveWeights();        // 4
CriterionResult CheckFusionEndpoints();        // 5
CriterionResult CheckLossGradients();          // 6
CriterionResult CheckCopyPasteBookkeeping();   // 7
CriterionResult CheckImportanceSampling();     // 8
CriterionResult CheckSyntheticEndToEnd();      // 9

// Reruns 7, 8 and 9 and compares digests with `first` (results that include
// those ids). With no earlier results both runs happen here.
CriterionResult CheckDeterminism(std::span<const CriterionResult> first = {});

// Runs criteria `ids` (all when empty) in order.
std::vector<CriterionResult> RunCriteria(std::span<const int> ids = {});

// "[PASS] 3 ema-contraction (0.01 s): detail"
std::string FormatResult(const CriterionResult& result);

}  // namespace simask::checks

#endif  // SIMASK_CHECKS_CRITERIA_H_
