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

#include "simask/copy_paste.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "simask/error.h"

namespace simask {
namespace {

// A source instance after resampling onto the target canvas.
struct Placement {
  Tensor mask;                      // H x W hard mask
  std::vector<std::size_t> source;  // source pixel per covered target pixel
};

std::optional<Placement> PlaceIdentity(const Tensor& mask) {
  Placement out{Tensor::Zeros(mask.shape()), {}};
  out.source.assign(mask.size(), 0);
  bool any = false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] >= 0.5f) {
      out.mask[i] = 1.0f;
      out.source[i] = i;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return out;
}

std::optional<Placement> PlaceJittered(const Tensor& mask, Rng& rng,
                                       const PasteOptions& options) {
  const auto crop = TightBox(mask, 0.5f);
  if (!crop) return std::nullopt;
  const std::size_t height = mask.dim(0);
  const std::size_t width = mask.dim(1);
  const auto y0 = static_cast<std::size_t>(crop->y0);
  const auto x0 = static_cast<std::size_t>(crop->x0);
  const auto crop_h = static_cast<std::size_t>(crop->height());
  const auto crop_w = static_cast<std::size_t>(crop->width());

  for (int attempt = 0; attempt < options.max_retries; ++attempt) {
    const double scale = rng.Uniform(options.min_scale, options.max_scale);
    const bool flip = rng.UniformDouble() < options.flip_prob;
    const std::size_t out_h = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(crop_h * scale)), 1, height);
    const std::size_t out_w = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(crop_w * scale)), 1, width);
    const std::size_t py = rng.UniformInt(height - out_h + 1);
    const std::size_t px = rng.UniformInt(width - out_w + 1);

    Placement out{Tensor::Zeros(mask.shape()), {}};
    out.source.assign(mask.size(), 0);
    bool any = false;
    for (std::size_t dy = 0; dy < out_h; ++dy) {
      const std::size_t sy = y0 + dy * crop_h / out_h;
      for (std::size_t dx = 0; dx < out_w; ++dx) {
        const std::size_t lx = dx * crop_w / out_w;
        const std::size_t sx = flip ? x0 + crop_w - 1 - lx : x0 + lx;
        if (mask.at(sy, sx) < 0.5f) continue;
        const std::size_t t = (py + dy) * width + (px + dx);
        out.mask[t] = 1.0f;
        out.source[t] = sy * width + sx;
        any = true;
      }
    }
    if (any) return out;
  }
  return std::nullopt;
}

}  // namespace

void ValidateEntry(const MemoryBankEntry& entry) {
  const std::size_t k = entry.labels.size();
  if (entry.boxes.size() != k || entry.masks.size() != k ||
      entry.scores.size() != k) {
    ThrowInvalid("memory entry " + entry.id +
                 ": labels, boxes, masks and scores differ in length");
  }
  if (entry.image.rank() != 3 || entry.image.dim(2) != 3) {
    ThrowInvalid("memory entry " + entry.id + ": image must be H x W x 3");
  }
  const Shape map_shape{entry.image.dim(0), entry.image.dim(1)};
  for (std::size_t i = 0; i < k; ++i) {
    if (entry.masks[i].shape() != map_shape) {
      ThrowInvalid("memory entry " + entry.id + ": mask size differs from image");
    }
    if (!(entry.scores[i] >= 0.0 && entry.scores[i] <= 1.0)) {
      ThrowInvalid("memory entry " + entry.id + ": score outside [0, 1]");
    }
  }
}

std::vector<std::size_t> PasteableInstances(const MemoryBankEntry& entry) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < entry.labels.size(); ++k) {
    const auto& data = entry.masks[k].data();
    const bool non_empty = std::any_of(data.begin(), data.end(),
                                       [](float v) { return v >= 0.5f; });
    if (entry.scores[k] > 0.0 && non_empty) out.push_back(k);
  }
  return out;
}

MemoryBank::MemoryBank(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) ThrowInvalid("memory bank capacity must be positive");
}

void MemoryBank::Push(MemoryBankEntry entry) {
  ValidateEntry(entry);
  entries_.push_back(std::move(entry));
  while (entries_.size() > capacity_) entries_.pop_front();
}

void MemoryBank::RefreshScores(std::size_t index,
                               std::span<const Tensor> prob_maps) {
  MemoryBankEntry& entry = entries_.at(index);
  entry.scores = ImportanceScores(prob_maps, entry.masks);
}

std::vector<double> ImportanceScores(std::span<const Tensor> prob_maps,
                                     std::span<const Tensor> hard_masks) {
  if (prob_maps.size() != hard_masks.size()) {
    ThrowInvalid("importance scores: prob and hard maps are not aligned");
  }
  std::vector<double> scores(prob_maps.size(), 0.0);
  for (std::size_t k = 0; k < prob_maps.size(); ++k) {
    if (prob_maps[k].shape() != hard_masks[k].shape()) {
      ThrowInvalid("importance scores: shape mismatch");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < prob_maps[k].size(); ++i) {
      if (hard_masks[k][i] == 1.0f) {
        sum += prob_maps[k][i];
        ++count;
      }
    }
    if (count > 0) scores[k] = std::clamp(sum / static_cast<double>(count), 0.0, 1.0);
  }
  return scores;
}

std::vector<std::size_t> SelectInstances(const MemoryBankEntry& entry, Rng& rng) {
  std::vector<std::size_t> pool = PasteableInstances(entry);
  if (pool.empty()) return {};
  const std::size_t quarter = std::max<std::size_t>(
      1, (entry.labels.size() + 3) / 4);
  std::size_t count = 1 + rng.UniformInt(3);
  count = std::min({count, quarter, pool.size()});

  std::vector<std::size_t> picked;
  for (std::size_t n = 0; n < count; ++n) {
    double total = 0.0;
    for (std::size_t k : pool) total += entry.scores[k];
    const double u = rng.UniformDouble() * total;
    std::size_t pos = pool.size() - 1;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      cumulative += entry.scores[pool[i]];
      if (u < cumulative) {
        pos = i;
        break;
      }
    }
    picked.push_back(pool[pos]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return picked;
}

AugmentedSample Composite(const TargetSample& target,
                          const MemoryBankEntry& source,
                          std::span<const std::size_t> selected, Rng& rng,
                          const PasteOptions& options) {
  if (target.image.rank() != 3 || target.image.dim(2) != 3) {
    ThrowInvalid("composite: target image must be H x W x 3");
  }
  if (source.image.shape() != target.image.shape()) {
    ThrowInvalid("composite: source and target images differ in size");
  }
  if (target.labels.size() != target.boxes.size() ||
      (!target.masks.empty() && target.masks.size() != target.labels.size())) {
    ThrowInvalid("composite: target annotations are not aligned");
  }
  const std::size_t height = target.image.dim(0);
  const std::size_t width = target.image.dim(1);

  AugmentedSample out;
  out.id = target.id;
  out.source_id = source.id;
  out.image = target.image;

  // Working set: target instances first, then successfully placed pastes.
  std::vector<Tensor> masks;
  std::vector<int> labels;
  std::vector<bool> flags;
  for (std::size_t k = 0; k < target.labels.size(); ++k) {
    Tensor mask = target.masks.empty()
                      ? BoxIndicator(target.boxes[k], height, width)
                      : target.masks[k];
    if (mask.shape() != Shape{height, width}) {
      ThrowInvalid("composite: target mask size differs from image");
    }
    for (float& v : mask.mutable_data()) v = v >= 0.5f ? 1.0f : 0.0f;
    masks.push_back(std::move(mask));
    labels.push_back(target.labels[k]);
    flags.push_back(false);
  }

  for (std::size_t idx : selected) {
    if (idx >= source.labels.size()) {
      ThrowInvalid("composite: selected instance out of range");
    }
    const auto placed = options.jitter
                            ? PlaceJittered(source.masks[idx], rng, options)
                            : PlaceIdentity(source.masks[idx]);
    if (!placed) continue;
    for (std::size_t i = 0; i < placed->mask.size(); ++i) {
      if (placed->mask[i] == 0.0f) continue;
      const std::size_t s = placed->source[i];
      for (std::size_t c = 0; c < 3; ++c) {
        out.image[3 * i + c] = source.image[3 * s + c];
      }
      for (Tensor& earlier : masks) earlier[i] = 0.0f;
    }
    masks.push_back(placed->mask);
    labels.push_back(source.labels[idx]);
    flags.push_back(true);
  }

  for (std::size_t k = 0; k < masks.size(); ++k) {
    const auto box = TightBox(masks[k], 0.5f);
    if (!box) continue;  // fully occluded
    out.labels.push_back(labels[k]);
    out.boxes.push_back(*box);
    out.masks.push_back(std::move(masks[k]));
    out.paste_flags.push_back(flags[k]);
  }
  return out;
}

AugmentedSample PasteFromBank(const TargetSample& target, const MemoryBank& bank,
                              Rng& rng, const PasteOptions& options) {
  if (bank.empty()) {
    return Composite(target, MemoryBankEntry{"", target.image, {}, {}, {}, {}},
                     {}, rng, options);
  }
  const MemoryBankEntry& source = bank.at(rng.UniformInt(bank.size()));
  const std::vector<std::size_t> selected = SelectInstances(source, rng);
  return Composite(target, source, selected, rng, options);
}

}  // namespace simask
