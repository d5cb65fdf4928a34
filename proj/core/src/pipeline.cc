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

#include "simask/pipeline.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <set>
#include <string>
#include <thread>

#include "simask/error.h"
#include "simask/losses.h"

namespace simask {
namespace {

void CheckMap(const Tensor& map, std::size_t height, std::size_t width,
              const std::string& what) {
  if (map.shape() != Shape{height, width}) {
    ThrowInvalid(what + " must be " + std::to_string(height) + " x " +
                 std::to_string(width));
  }
}

// Positives grouped by gt instance, preserving input order.
std::vector<std::vector<PositiveSample>> GroupPositives(const ImageInput& image) {
  std::vector<std::vector<PositiveSample>> groups(image.instances.size());
  for (const PositiveSample& p : image.positives) {
    groups[p.gt_instance].push_back(p);
  }
  return groups;
}

std::set<int> PresentClasses(const ImageInput& image) {
  std::set<int> classes;
  for (const Instance& inst : image.instances) classes.insert(inst.class_id);
  return classes;
}

LossReport Losses(const ImageInput& image, std::span<const PseudoLabel> labels,
                  std::span<const std::optional<Tensor>> instance_maps,
                  const Config& config, std::uint64_t step) {
  LossReport report;
  report.image = image.id;
  const LossWeights weights = EffectiveLossWeights(config, step);
  report.lambda1 = weights.lambda1;
  report.lambda2 = weights.lambda2;

  std::vector<Tensor> preds;
  std::vector<std::size_t> index;
  for (const PositiveSample& p : image.positives) {
    preds.push_back(p.pred_mask);
    index.push_back(p.gt_instance);
  }
  report.pseudo = PseudoMaskLoss(preds, labels, index).value;

  // The paste loss compares each pasted instance's map against the mask it
  // was pasted with; instances without positives have no map.
  std::vector<Tensor> paste_preds;
  std::vector<Tensor> paste_targets;
  for (std::size_t k = 0; k < image.pasted.size(); ++k) {
    if (!image.pasted[k] || !instance_maps[k]) continue;
    paste_preds.push_back(*instance_maps[k]);
    paste_targets.push_back(image.paste_masks[k]);
  }
  const std::unique_ptr<bool[]> flags(new bool[paste_preds.size() + 1]);
  std::fill_n(flags.get(), paste_preds.size(), true);
  report.paste =
      PasteLoss(paste_preds, paste_targets,
                std::span<const bool>(flags.get(), paste_preds.size()))
          .value;

  if (config.lowlevel_enabled) {
    const std::size_t height = image.features.height();
    const std::size_t width = image.features.width();
    double sum = 0.0;
    for (const PositiveSample& p : image.positives) {
      sum += LowLevelLoss(ToDouble(p.pred_mask), height, width,
                          image.instances[p.gt_instance].box, image.image,
                          config.lowlevel())
                 .value;
    }
    if (!image.positives.empty()) {
      report.lowlevel = sum / static_cast<double>(image.positives.size());
    }
  } else {
    report.lowlevel = image.external_lowlevel.value_or(0.0);
  }
  report.total = TotalLoss(report.lowlevel, report.pseudo, report.paste,
                           report.lambda1, report.lambda2);
  return report;
}

std::optional<Tensor> InstanceMap(const std::vector<PositiveSample>& group,
                                  const Box& gt_box, double mu) {
  if (group.empty()) return std::nullopt;
  return InstanceProbMap(group, PositiveWeights(SampleIous(group, gt_box), mu));
}

ImageResult ProcessImageUnchecked(const ImageInput& image,
                                  const PrototypeBank& bank,
                                  const Config& config) {
  const std::size_t height = image.features.height();
  const std::size_t width = image.features.width();
  ImageResult result;
  result.id = image.id;

  for (int c : PresentClasses(image)) {
    if (!bank.initialized(static_cast<std::size_t>(c))) continue;
    result.semantic_maps[c] = std::make_shared<const SemanticMap>(
        SemanticProbMap(image.features, bank, c, config.tau));
  }

  const auto groups = GroupPositives(image);
  for (std::size_t k = 0; k < image.instances.size(); ++k) {
    const Instance& inst = image.instances[k];
    const Box box = inst.box.Clamped(height, width);
    const auto it = result.semantic_maps.find(inst.class_id);
    const SemanticMap* semantic =
        it == result.semantic_maps.end() ? nullptr : it->second.get();

    InstanceResult r;
    Tensor prob;
    r.instance_map = InstanceMap(groups[k], inst.box, config.mu);
    if (r.instance_map) {
      prob = Fuse(semantic, *r.instance_map, config.alpha);
      r.semantic_used = semantic != nullptr;
    } else if (semantic != nullptr) {
      prob = semantic->probs;
      r.semantic_used = true;
    } else {
      prob = Tensor::Filled({height, width}, 0.5f);
    }
    prob = RestrictToBox(prob, box);
    r.label = ThresholdSelect(prob, config.tau_low, config.tau_high);
    const Tensor* probs = &r.label.prob;
    r.importance = ImportanceScores(std::span<const Tensor>(probs, 1),
                                    std::span<const Tensor>(&r.label.hard, 1))[0];
    result.instances.push_back(std::move(r));
  }

  std::vector<PseudoLabel> labels;
  std::vector<std::optional<Tensor>> maps;
  for (const InstanceResult& r : result.instances) {
    labels.push_back(r.label);
    maps.push_back(r.instance_map);
  }
  result.loss = Losses(image, labels, maps, config, bank.update_count());

  std::vector<Tensor> hard;
  for (const InstanceResult& r : result.instances) hard.push_back(r.label.hard);
  for (int c : PresentClasses(image)) {
    const FeatureRows features =
        GatherClassPixels(image.features, image.instances, hard, c);
    result.class_updates.push_back(ComputeClassUpdate(
        bank, static_cast<std::size_t>(c), features, config.sinkhorn()));
  }
  return result;
}

}  // namespace

void ValidateImageInput(const ImageInput& image, std::size_t num_classes) {
  const std::string where = "image " + image.id + ": ";
  try {
    const std::size_t height = image.features.height();
    const std::size_t width = image.features.width();
    if (!image.features.normalized()) ThrowInvalid("features are not normalized");
    if (image.image.shape() != Shape{height, width, 3}) {
      ThrowInvalid("image must be H x W x 3 matching the feature map");
    }
    for (std::size_t k = 0; k < image.instances.size(); ++k) {
      const Instance& inst = image.instances[k];
      if (inst.class_id < 0 || static_cast<std::size_t>(inst.class_id) >= num_classes) {
        ThrowInvalid("instance " + std::to_string(k) + " has class " +
                     std::to_string(inst.class_id) + " outside [0, C)");
      }
      ValidateBox(inst.box);
    }
    for (std::size_t j = 0; j < image.positives.size(); ++j) {
      const PositiveSample& p = image.positives[j];
      if (p.gt_instance >= image.instances.size()) {
        ThrowInvalid("positive " + std::to_string(j) +
                     " references missing instance " +
                     std::to_string(p.gt_instance));
      }
      CheckMap(p.pred_mask, height, width, "positive " + std::to_string(j) + " mask");
    }
    if (!image.pasted.empty()) {
      if (image.pasted.size() != image.instances.size() ||
          image.paste_masks.size() != image.instances.size()) {
        ThrowInvalid("paste flags and masks must cover every instance");
      }
      for (std::size_t k = 0; k < image.pasted.size(); ++k) {
        if (image.pasted[k]) {
          CheckMap(image.paste_masks[k], height, width,
                   "paste mask " + std::to_string(k));
        }
      }
    }
    if (image.prediction_source != "online" &&
        image.prediction_source != "momentum") {
      ThrowInvalid("prediction_source must be 'online' or 'momentum'");
    }
  } catch (const Error& e) {
    throw Error(e.category(), where + e.what());
  }
}

ImageResult ProcessImage(const ImageInput& image, const PrototypeBank& bank,
                         const Config& config) {
  ValidateImageInput(image, bank.num_classes());
  if (image.features.depth() != bank.dim()) {
    ThrowInvalid("image " + image.id + ": feature depth differs from the bank");
  }
  try {
    return ProcessImageUnchecked(image, bank, config);
  } catch (const Error& e) {
    throw Error(e.category(), "image " + image.id + ": " + e.what());
  }
}

BatchResult GeneratePseudoLabels(const BatchInput& batch, PrototypeBank& bank,
                                 const Config& config, int workers) {
  ValidateConfig(config);
  if (bank.num_classes() != config.num_classes ||
      bank.num_subcenters() != config.num_subcenters) {
    throw Error(ErrorCategory::kConfig,
                "bank shape does not match num_classes / num_subcenters");
  }
  const std::size_t n = batch.images.size();
  BatchResult out;
  out.images.resize(n);
  std::vector<std::exception_ptr> errors(n);

  // Workers read the bank snapshot only; each writes its own result slots.
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out.images[i] = ProcessImage(batch.images[i], bank, config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1,
                              std::max<std::size_t>(n, 1));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (const ImageResult& image : out.images) {
    for (const ClassUpdate& u : image.class_updates) {
      bank.EmaUpdate(u.class_id, u.subcenters.centroids, u.subcenters.counts);
    }
  }
  bank.set_update_count(bank.update_count() + 1);
  return out;
}

LossReport ComputeLossReport(const ImageInput& image,
                             std::span<const PseudoLabel> labels,
                             const Config& config, std::uint64_t step) {
  ValidateImageInput(image, config.num_classes);
  if (labels.size() != image.instances.size()) {
    ThrowInvalid("image " + image.id + ": expected one pseudo label per instance");
  }
  try {
    const auto groups = GroupPositives(image);
    std::vector<std::optional<Tensor>> maps;
    for (std::size_t k = 0; k < image.instances.size(); ++k) {
      maps.push_back(InstanceMap(groups[k], image.instances[k].box, config.mu));
    }
    return Losses(image, labels, maps, config, step);
  } catch (const Error& e) {
    throw Error(e.category(), "image " + image.id + ": " + e.what());
  }
}

MemoryBankEntry MakeMemoryEntry(const ImageInput& image,
                                const ImageResult& result) {
  MemoryBankEntry entry;
  entry.id = image.id;
  entry.image = image.image;
  for (std::size_t k = 0; k < image.instances.size(); ++k) {
    entry.labels.push_back(image.instances[k].class_id);
    entry.boxes.push_back(image.instances[k].box);
    entry.masks.push_back(result.instances[k].label.hard);
    entry.scores.push_back(result.instances[k].importance);
  }
  return entry;
}

double MaskIou(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) ThrowInvalid("mask IoU: shapes differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] >= 0.5f;
    const bool y = b[i] >= 0.5f;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace simask
