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

#ifndef SIMASK_COPY_PASTE_H_
#define SIMASK_COPY_PASTE_H_

#include <cstddef>
#include <deque>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "simask/box.h"
#include "simask/rng.h"
#include "simask/tensor.h"

namespace simask {

// A past training image with its pseudo masks and per-instance scores.
struct MemoryBankEntry {
  std::string id;
  Tensor image;               // H x W x 3
  std::vector<int> labels;
  std::vector<Box> boxes;
  std::vector<Tensor> masks;  // hard {0, 1}, H x W each
  std::vector<double> scores; // in [0, 1]
};

// Throws unless labels, boxes, masks and scores agree in length, masks match
// the image size and every score lies in [0, 1].
void ValidateEntry(const MemoryBankEntry& entry);

// Instances that can be pasted: positive score and a non-empty mask.
std::vector<std::size_t> PasteableInstances(const MemoryBankEntry& entry);

// FIFO store of recent samples. Pushing past capacity evicts the oldest.
class MemoryBank {
 public:
  static constexpr std::size_t kDefaultCapacity = 100;

  explicit MemoryBank(std::size_t capacity = kDefaultCapacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const MemoryBankEntry& at(std::size_t i) const { return entries_.at(i); }
  const std::deque<MemoryBankEntry>& entries() const { return entries_; }

  void Push(MemoryBankEntry entry);

  // Scores are frozen at push time; this recomputes them for one entry from
  // fresh probability maps.
  void RefreshScores(std::size_t index, std::span<const Tensor> prob_maps);

 private:
  std::size_t capacity_;
  std::deque<MemoryBankEntry> entries_;
};

// S_k = mean of prob over the foreground pixels of hard mask k; 0 (and not
// pasteable) for an empty mask.
std::vector<double> ImportanceScores(std::span<const Tensor> prob_maps,
                                     std::span<const Tensor> hard_masks);

// Draws the instances to paste from one entry. Consumes, in order:
//   1. UniformInt(3) for the target count n = 1 + draw, capped at
//      max(1, ceil(K / 4)) and at the number of pasteable instances;
//   2. one UniformDouble per pick, sampling without replacement with
//      probability proportional to score.
// Returns an empty list when nothing is pasteable (no draws consumed).
std::vector<std::size_t> SelectInstances(const MemoryBankEntry& entry, Rng& rng);

struct PasteOptions {
  bool jitter = true;
  double min_scale = 0.5;
  double max_scale = 1.5;
  double flip_prob = 0.5;
  int max_retries = 10;
};

// Image to paste onto. When masks is empty each instance's mask is its box.
struct TargetSample {
  std::string id;
  Tensor image;
  std::vector<int> labels;
  std::vector<Box> boxes;
  std::vector<Tensor> masks;
};

// Result of pasting; pasted instances come last with paste_flags set, and
// their visible masks are the targets for the paste loss.
struct AugmentedSample {
  std::string id;
  std::string source_id;
  Tensor image;
  std::vector<int> labels;
  std::vector<Box> boxes;
  std::vector<Tensor> masks;
  std::vector<bool> paste_flags;
};

// Pastes the selected source instances onto the target.
//
// With jitter on, each instance consumes per attempt: UniformDouble (scale
// in [min_scale, max_scale]), UniformDouble (flip if < flip_prob),
// UniformInt (row offset), UniformInt (column offset). The instance's tight
// crop is resampled nearest-neighbour and placed fully inside the canvas; an
// attempt whose resampled mask is empty is redrawn, up to max_retries, after
// which the instance is skipped. With jitter off instances keep their
// source position and no draws are made.
//
// Pasted pixels overwrite the image, later pastes occlude earlier ones and
// all pastes occlude target instances. Every surviving instance's box is the
// tight box of its visible mask; instances with no visible pixel are dropped.
AugmentedSample Composite(const TargetSample& target,
                          const MemoryBankEntry& source,
                          std::span<const std::size_t> selected, Rng& rng,
                          const PasteOptions& options = {});

// Source entry by UniformInt(bank size), then SelectInstances, then
// Composite. An empty bank returns the target unchanged.
AugmentedSample PasteFromBank(const TargetSample& target, const MemoryBank& bank,
                              Rng& rng, const PasteOptions& options = {});

// Directory layout: manifest.json with {"capacity", "entries": [{"id",
// "labels", "boxes", "scores", "image", "masks"}]} where image/masks are
// paths relative to the directory.
void SaveMemoryBank(const MemoryBank& bank, const std::filesystem::path& dir);
MemoryBank LoadMemoryBank(const std::filesystem::path& dir);

// Augmented samples use the same layout with a per-entry "paste_flags".
void SaveAugmentedSamples(std::span<const AugmentedSample> samples,
                          const std::filesystem::path& dir);
std::vector<AugmentedSample> LoadAugmentedSamples(const std::filesystem::path& dir);

}  // namespace simask

#endif  // SIMASK_COPY_PASTE_H_
