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

#ifndef SIMASK_SINKHORN_H_
#define SIMASK_SINKHORN_H_

#include <cstddef>
#include <vector>

#include "simask/matrix.h"

namespace simask {

struct SinkhornOptions {
  double epsilon = 0.05;
  int max_iter = 100;
  double tol = 1e-6;
};

// Entropy-regularized transport between L sub-centers (rows) and N pixels
// (columns) with uniform marginals r = 1/L and h = 1/N.
struct TransportPlan {
  Matrix q;                           // L x N, entries >= 0, total mass 1
  std::vector<double> row_marginal;   // r
  std::vector<double> col_marginal;   // h
  int iterations = 0;
  double max_violation = 0.0;         // max |row sum - r|, |col sum - h|
  bool converged = false;             // false: max_iter hit before tol
};

// Solves max_Q Tr(Q^T S) + eps * H(Q) over plans with marginals (1/L, 1/N).
//
// The iteration runs on log-domain dual potentials f, g with
// Q = exp(S / eps + f 1^T + 1 g^T), alternately setting
//   f_i = log r_i - logsumexp_j(S_ij / eps + g_j)
//   g_j = log h_j - logsumexp_i(S_ij / eps + f_i)
// which is diag(u) exp(S / eps) diag(v) with u = e^f, v = e^g, but never
// materializes exp(S / eps). Stops once the row marginal error is <= tol
// (columns are exact after each g step) or after max_iter sweeps; in the
// latter case the plan is returned with converged = false.
//
// Throws on empty or non-finite scores and on epsilon <= 0.
TransportPlan SinkhornAssign(const Matrix& scores,
                             const SinkhornOptions& options = {});

// Max absolute deviation of the plan's row/column sums from its marginals.
double MaxMarginalViolation(const TransportPlan& plan);

// Tr(Q^T S) + eps * H(Q), with H(Q) = -sum Q log Q and 0 log 0 = 0.
double EntropicObjective(const Matrix& q, const Matrix& scores, double epsilon);

// Per column, the row holding the most mass; ties go to the lowest row.
std::vector<std::size_t> HardenAssignments(const TransportPlan& plan);

}  // namespace simask

#endif  // SIMASK_SINKHORN_H_
