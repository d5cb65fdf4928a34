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

#include "simask/sinkhorn.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simask/error.h"

namespace simask {
namespace {

// logsumexp_j(log_kernel(i, j) + g_j) for every row i.
void RowLogSumExp(const Matrix& log_kernel, const std::vector<double>& g,
                  std::vector<double>& out) {
  const std::size_t cols = log_kernel.cols();
  for (std::size_t i = 0; i < log_kernel.rows(); ++i) {
    const auto row = log_kernel.row(i);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols; ++j) peak = std::max(peak, row[j] + g[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) sum += std::exp(row[j] + g[j] - peak);
    out[i] = peak + std::log(sum);
  }
}

// logsumexp_i(log_kernel(i, j) + f_i) for every column j.
void ColLogSumExp(const Matrix& log_kernel, const std::vector<double>& f,
                  std::vector<double>& peak, std::vector<double>& out) {
  const std::size_t cols = log_kernel.cols();
  std::fill(peak.begin(), peak.end(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < log_kernel.rows(); ++i) {
    const auto row = log_kernel.row(i);
    for (std::size_t j = 0; j < cols; ++j) {
      peak[j] = std::max(peak[j], row[j] + f[i]);
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < log_kernel.rows(); ++i) {
    const auto row = log_kernel.row(i);
    for (std::size_t j = 0; j < cols; ++j) {
      out[j] += std::exp(row[j] + f[i] - peak[j]);
    }
  }
  for (std::size_t j = 0; j < cols; ++j) out[j] = peak[j] + std::log(out[j]);
}

}  // namespace

TransportPlan SinkhornAssign(const Matrix& scores,
                             const SinkhornOptions& options) {
  if (scores.rows() == 0 || scores.cols() == 0) {
    ThrowInvalid("sinkhorn: score matrix must be non-empty");
  }
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
    ThrowInvalid("sinkhorn: epsilon must be positive");
  }
  if (options.tol < 0.0) ThrowInvalid("sinkhorn: tol must be nonnegative");

  const std::size_t num_rows = scores.rows();
  const std::size_t num_cols = scores.cols();
  Matrix log_kernel(num_rows, num_cols);
  for (std::size_t k = 0; k < scores.values().size(); ++k) {
    const double s = scores.values()[k];
    if (!std::isfinite(s)) {
      ThrowInvalid("sinkhorn: non-finite score at index " + std::to_string(k));
    }
    log_kernel.values()[k] = s / options.epsilon;
  }

  TransportPlan plan;
  plan.row_marginal.assign(num_rows, 1.0 / static_cast<double>(num_rows));
  plan.col_marginal.assign(num_cols, 1.0 / static_cast<double>(num_cols));
  const double log_r = -std::log(static_cast<double>(num_rows));
  const double log_h = -std::log(static_cast<double>(num_cols));

  std::vector<double> f(num_rows, 0.0);
  std::vector<double> g(num_cols, 0.0);
  std::vector<double> row_lse(num_rows);
  std::vector<double> col_lse(num_cols);
  std::vector<double> col_peak(num_cols);

  int sweeps = 0;
  for (;;) {
    RowLogSumExp(log_kernel, g, row_lse);
    if (sweeps > 0) {
      double violation = 0.0;
      for (std::size_t i = 0; i < num_rows; ++i) {
        violation = std::max(
            violation, std::abs(std::exp(f[i] + row_lse[i]) -
                                plan.row_marginal[i]));
      }
      if (violation <= options.tol || sweeps >= options.max_iter) break;
    }
    for (std::size_t i = 0; i < num_rows; ++i) f[i] = log_r - row_lse[i];
    ColLogSumExp(log_kernel, f, col_peak, col_lse);
    for (std::size_t j = 0; j < num_cols; ++j) g[j] = log_h - col_lse[j];
    ++sweeps;
  }

  plan.q = Matrix(num_rows, num_cols);
  for (std::size_t i = 0; i < num_rows; ++i) {
    for (std::size_t j = 0; j < num_cols; ++j) {
      plan.q(i, j) = std::exp(log_kernel(i, j) + f[i] + g[j]);
    }
  }
  plan.iterations = sweeps;
  plan.max_violation = MaxMarginalViolation(plan);
  plan.converged = plan.max_violation <= options.tol;
  return plan;
}

double MaxMarginalViolation(const TransportPlan& plan) {
  const Matrix& q = plan.q;
  std::vector<double> col_sums(q.cols(), 0.0);
  double violation = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < q.cols(); ++j) {
      row_sum += q(i, j);
      col_sums[j] += q(i, j);
    }
    violation = std::max(violation, std::abs(row_sum - plan.row_marginal[i]));
  }
  for (std::size_t j = 0; j < q.cols(); ++j) {
    violation = std::max(violation, std::abs(col_sums[j] - plan.col_marginal[j]));
  }
  return violation;
}

double EntropicObjective(const Matrix& q, const Matrix& scores,
                         double epsilon) {
  double linear = 0.0;
  double entropy = 0.0;
  for (std::size_t k = 0; k < q.values().size(); ++k) {
    const double x = q.values()[k];
    linear += x * scores.values()[k];
    if (x > 0.0) entropy -= x * std::log(x);
  }
  return linear + epsilon * entropy;
}

std::vector<std::size_t> HardenAssignments(const TransportPlan& plan) {
  const Matrix& q = plan.q;
  std::vector<std::size_t> assignment(q.cols(), 0);
  for (std::size_t j = 0; j < q.cols(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < q.rows(); ++i) {
      if (q(i, j) > q(best, j)) best = i;
    }
    assignment[j] = best;
  }
  return assignment;
}

}  // namespace simask
