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

#include "simask_checks/oracles.h"

#include <algorithm>
#include <cmath>

namespace simask::checks {

namespace {

// Scales rows then columns of `m` in place towards uniform marginals.
// Returns the largest marginal error seen before the pass.
double NormalizePass(Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const double r = 1.0 / static_cast<double>(rows);
  const double c = 1.0 / static_cast<double>(cols);
  double error = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) sum += m(i, j);
    error = std::max(error, std::abs(sum - r));
    for (std::size_t j = 0; j < cols; ++j) m(i, j) *= r / sum;
  }
  for (std::size_t j = 0; j < cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) sum += m(i, j);
    error = std::max(error, std::abs(sum - c));
    for (std::size_t i = 0; i < rows; ++i) m(i, j) *= c / sum;
  }
  return error;
}

}  // namespace

Matrix NaiveSinkhorn(const Matrix& scores, double epsilon, int max_iter,
                     double stop_tol) {
  double peak = scores.values()[0];
  for (double s : scores.values()) peak = std::max(peak, s);
  Matrix k(scores.rows(), scores.cols());
  for (std::size_t i = 0; i < k.values().size(); ++i) {
    k.values()[i] = std::exp((scores.values()[i] - peak) / epsilon);
  }
  for (int it = 0; it < max_iter; ++it) {
    if (NormalizePass(k) < stop_tol) break;
  }
  return k;
}

Matrix RandomFeasiblePlan(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  // Cubing spreads mass unevenly so the plans are far from the product.
  for (double& v : m.values()) {
    const double u = rng.UniformDouble();
    v = 1e-9 + u * u * u;
  }
  for (int it = 0; it < 10000; ++it) {
    if (NormalizePass(m) < 1e-15 && it > 0) break;
  }
  return m;
}

std::vector<double> FiniteDifference(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double RelativeError(std::span<const double> a, std::span<const double> b,
                     double floor) {
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    norm += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), floor);
}

PixelSet ToPixelSet(const Tensor& mask) {
  PixelSet out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] >= 0.5f) out.insert(i);
  }
  return out;
}

std::optional<Box> SetBox(const PixelSet& pixels, std::size_t width) {
  if (pixels.empty()) return std::nullopt;
  std::size_t h0 = SIZE_MAX, w0 = SIZE_MAX, h1 = 0, w1 = 0;
  for (std::size_t p : pixels) {
    h0 = std::min(h0, p / width);
    h1 = std::max(h1, p / width);
    w0 = std::min(w0, p % width);
    w1 = std::max(w1, p % width);
  }
  return Box{static_cast<double>(w0), static_cast<double>(h0),
             static_cast<double>(w1 + 1), static_cast<double>(h1 + 1)};
}

std::vector<OracleInstance> CompositeOracle(const TargetSample& target,
                                            const MemoryBankEntry& source,
                                            std::span<const std::size_t> selected) {
  const std::size_t height = target.image.dim(0);
  const std::size_t width = target.image.dim(1);
  std::vector<OracleInstance> layers;
  for (std::size_t k = 0; k < target.labels.size(); ++k) {
    PixelSet pixels;
    if (target.masks.empty()) {
      for (std::size_t h = 0; h < height; ++h) {
        for (std::size_t w = 0; w < width; ++w) {
          if (target.boxes[k].Contains(h, w)) pixels.insert(h * width + w);
        }
      }
    } else {
      pixels = ToPixelSet(target.masks[k]);
    }
    layers.push_back({target.labels[k], false, std::move(pixels), {}});
  }
  for (std::size_t idx : selected) {
    PixelSet pixels = ToPixelSet(source.masks[idx]);
    if (pixels.empty()) continue;
    // Every earlier layer loses what this paste covers.
    for (OracleInstance& below : layers) {
      for (std::size_t p : pixels) below.pixels.erase(p);
    }
    layers.push_back({source.labels[idx], true, std::move(pixels), {}});
  }
  std::vector<OracleInstance> out;
  for (OracleInstance& layer : layers) {
    const auto box = SetBox(layer.pixels, width);
    if (!box) continue;
    layer.box = *box;
    out.push_back(std::move(layer));
  }
  return out;
}

std::set<std::size_t> GatherOracle(std::size_t height, std::size_t width,
                                   std::span<const int> classes,
                                   std::span<const Box> boxes,
                                   std::span<const Tensor> hard_masks,
                                   int class_id) {
  std::set<std::size_t> out;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (classes[k] != class_id) continue;
    for (std::size_t p : ToPixelSet(hard_masks[k])) {
      const std::size_t h = p / width;
      const std::size_t w = p % width;
      if (h < height && boxes[k].Contains(h, w)) out.insert(p);
    }
  }
  return out;
}

void Digest::Add(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash_ ^= bytes[i];
    hash_ *= 0x100000001b3ULL;
  }
}

void Digest::Add(const Tensor& t) {
  for (std::size_t d : t.shape()) Add(static_cast<std::uint64_t>(d));
  Add(t.data().data(), t.size() * sizeof(float));
}

}  // namespace simask::checks
