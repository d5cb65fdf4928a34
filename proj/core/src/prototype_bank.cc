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

#include "simask/prototype_bank.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "simask/error.h"

namespace simask {
namespace {

constexpr double kUnitNormTolerance = 1e-5;

double Norm(std::span<const float> v) { return std::sqrt(Dot(v, v)); }

}  // namespace

PrototypeBank::PrototypeBank(std::size_t num_classes,
                             std::size_t num_subcenters, std::size_t dim,
                             double gamma)
    : num_classes_(num_classes),
      num_subcenters_(num_subcenters),
      dim_(dim),
      gamma_(gamma),
      prototypes_(Tensor::Zeros({num_classes, num_subcenters, dim})),
      rows_set_(num_classes * num_subcenters, false) {
  if (num_classes == 0 || num_subcenters == 0 || dim == 0) {
    ThrowInvalid("prototype bank dimensions must be positive");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    ThrowInvalid("momentum gamma must lie in [0, 1]");
  }
}

PrototypeBank PrototypeBank::FromState(Tensor prototypes,
                                       std::vector<bool> rows_set,
                                       double gamma,
                                       std::uint64_t update_count) {
  if (prototypes.rank() != 3) ThrowInvalid("prototypes must be C x L x D");
  PrototypeBank bank(prototypes.dim(0), prototypes.dim(1), prototypes.dim(2),
                     gamma);
  if (rows_set.size() != bank.num_classes_ * bank.num_subcenters_) {
    ThrowInvalid("rows_set length does not match C x L");
  }
  bank.prototypes_ = std::move(prototypes);
  bank.rows_set_ = std::move(rows_set);
  bank.update_count_ = update_count;
  for (std::size_t c = 0; c < bank.num_classes_; ++c) {
    for (std::size_t l = 0; l < bank.num_subcenters_; ++l) {
      if (bank.row_set(c, l) &&
          std::abs(Norm(bank.prototype(c, l)) - 1.0) > kUnitNormTolerance) {
        ThrowInvalid("prototype (" + std::to_string(c) + ", " +
                     std::to_string(l) + ") is not unit norm");
      }
    }
  }
  return bank;
}

void PrototypeBank::CheckClass(std::size_t class_id) const {
  if (class_id >= num_classes_) {
    ThrowInvalid("class id " + std::to_string(class_id) + " out of range");
  }
}

bool PrototypeBank::initialized(std::size_t class_id) const {
  CheckClass(class_id);
  for (std::size_t l = 0; l < num_subcenters_; ++l) {
    if (!rows_set_[class_id * num_subcenters_ + l]) return false;
  }
  return true;
}

bool PrototypeBank::row_set(std::size_t class_id, std::size_t subcenter) const {
  return rows_set_[class_id * num_subcenters_ + subcenter];
}

std::span<const float> PrototypeBank::prototype(std::size_t class_id,
                                                std::size_t subcenter) const {
  return prototypes_.data().subspan(
      (class_id * num_subcenters_ + subcenter) * dim_, dim_);
}

std::vector<double> EmaStep(std::span<const float> p_old,
                            std::span<const float> centroid, double gamma) {
  std::vector<double> out(p_old.size());
  for (std::size_t d = 0; d < p_old.size(); ++d) {
    out[d] = gamma * static_cast<double>(p_old[d]) +
             (1.0 - gamma) * static_cast<double>(centroid[d]);
  }
  return out;
}

void PrototypeBank::EmaUpdate(std::size_t class_id,
                              const FeatureRows& centroids,
                              std::span<const std::size_t> counts) {
  CheckClass(class_id);
  if (centroids.rows() != num_subcenters_ || centroids.cols() != dim_ ||
      counts.size() != num_subcenters_) {
    ThrowInvalid("ema update: expected " + std::to_string(num_subcenters_) +
                 " x " + std::to_string(dim_) + " centroids");
  }
  std::span<float> data = prototypes_.mutable_data();
  for (std::size_t l = 0; l < num_subcenters_; ++l) {
    if (counts[l] == 0) continue;
    std::span<float> row =
        data.subspan((class_id * num_subcenters_ + l) * dim_, dim_);
    const auto centroid = centroids.row(l);
    const std::size_t flat = class_id * num_subcenters_ + l;
    if (!rows_set_[flat]) {
      std::copy(centroid.begin(), centroid.end(), row.begin());
      rows_set_[flat] = true;
      continue;
    }
    std::vector<double> blended = EmaStep(row, centroid, gamma_);
    double norm = 0.0;
    for (double x : blended) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      // Antipodal centroid with gamma = 0.5.
      std::copy(centroid.begin(), centroid.end(), row.begin());
      continue;
    }
    for (std::size_t d = 0; d < dim_; ++d) {
      row[d] = static_cast<float>(blended[d] / norm);
    }
  }
}

FeatureRows GatherClassPixels(const FeatureMap& fm,
                              std::span<const Instance> instances,
                              std::span<const Tensor> hard_masks,
                              int class_id) {
  if (instances.size() != hard_masks.size()) {
    ThrowInvalid("gather: instances and masks are not aligned");
  }
  const std::size_t height = fm.height();
  const std::size_t width = fm.width();
  std::vector<std::size_t> members;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    if (instances[k].class_id != class_id) continue;
    if (hard_masks[k].shape() != Shape{height, width}) {
      ThrowInvalid("gather: mask " + std::to_string(k) +
                   " does not match the feature map size");
    }
    members.push_back(k);
  }

  FeatureRows out(0, fm.depth());
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      const bool selected =
          std::any_of(members.begin(), members.end(), [&](std::size_t k) {
            return instances[k].box.Contains(h, w) &&
                   hard_masks[k].at(h, w) >= 0.5f;
          });
      if (selected) out.AppendRow(fm.pixel(h * width + w));
    }
  }
  return out;
}

Matrix PrototypeScores(const FeatureRows& prototypes,
                       const FeatureRows& features) {
  Matrix scores(prototypes.rows(), features.rows());
  for (std::size_t l = 0; l < prototypes.rows(); ++l) {
    for (std::size_t i = 0; i < features.rows(); ++i) {
      scores(l, i) = Dot(prototypes.row(l), features.row(i));
    }
  }
  return scores;
}

FeatureRows ScoringPrototypes(const PrototypeBank& bank, std::size_t class_id,
                              const FeatureRows& features) {
  const std::size_t num_sub = bank.num_subcenters();
  FeatureRows out(num_sub, bank.dim());
  const bool warm = bank.initialized(class_id);
  for (std::size_t l = 0; l < num_sub; ++l) {
    std::span<const float> src;
    if (warm || bank.row_set(class_id, l) || features.empty()) {
      src = bank.prototype(class_id, l);
    } else {
      const std::size_t index = static_cast<std::size_t>(
          (static_cast<double>(l) + 0.5) * static_cast<double>(features.rows()) /
          static_cast<double>(num_sub));
      src = features.row(std::min(index, features.rows() - 1));
    }
    std::copy(src.begin(), src.end(), out.row(l).begin());
  }
  return out;
}

Subcenters ComputeSubcenters(const FeatureRows& features,
                             std::span<const std::size_t> assignment,
                             std::size_t num_subcenters) {
  if (assignment.size() != features.rows()) {
    ThrowInvalid("subcenters: assignment length does not match features");
  }
  const std::size_t dim = features.cols();
  std::vector<double> sums(num_subcenters * dim, 0.0);
  Subcenters out{FeatureRows(num_subcenters, dim),
                 std::vector<std::size_t>(num_subcenters, 0)};
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const std::size_t l = assignment[i];
    if (l >= num_subcenters) {
      ThrowInvalid("subcenters: index " + std::to_string(l) + " out of range");
    }
    ++out.counts[l];
    const auto f = features.row(i);
    for (std::size_t d = 0; d < dim; ++d) sums[l * dim + d] += f[d];
  }
  for (std::size_t l = 0; l < num_subcenters; ++l) {
    if (out.counts[l] == 0) continue;
    // The mean and the sum share a direction, so normalize the sum.
    double norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) norm += sums[l * dim + d] * sums[l * dim + d];
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      out.counts[l] = 0;
      continue;
    }
    for (std::size_t d = 0; d < dim; ++d) {
      out.centroids(l, d) = static_cast<float>(sums[l * dim + d] / norm);
    }
  }
  return out;
}

ClassUpdate ComputeClassUpdate(const PrototypeBank& bank, std::size_t class_id,
                               const FeatureRows& features,
                               const SinkhornOptions& options) {
  ClassUpdate update;
  update.class_id = class_id;
  update.num_pixels = features.rows();
  if (features.empty()) {
    update.subcenters = Subcenters{
        FeatureRows(bank.num_subcenters(), bank.dim()),
        std::vector<std::size_t>(bank.num_subcenters(), 0)};
    return update;
  }
  const FeatureRows scoring = ScoringPrototypes(bank, class_id, features);
  const TransportPlan plan =
      SinkhornAssign(PrototypeScores(scoring, features), options);
  update.converged = plan.converged;
  update.max_violation = plan.max_violation;
  update.subcenters = ComputeSubcenters(features, HardenAssignments(plan),
                                        bank.num_subcenters());
  return update;
}

}  // namespace simask
