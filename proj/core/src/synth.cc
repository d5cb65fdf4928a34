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

#include "simask/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simask/dataset_io.h"
#include "simask/error.h"
#include "simask/rng.h"

namespace simask {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kBackground = -1;
constexpr std::size_t kMinVisiblePixels = 16;
constexpr int kPlacementAttempts = 20;
constexpr float kColorNoise = 0.02f;

[[noreturn]] void SpecError(const std::string& message) {
  throw Error(ErrorCategory::kConfig, "synthetic spec: " + message);
}

// Fixed palette; classes beyond its length wrap around.
constexpr float kPalette[][3] = {
    {0.85f, 0.20f, 0.20f}, {0.20f, 0.70f, 0.25f}, {0.20f, 0.30f, 0.85f},
    {0.90f, 0.75f, 0.15f}, {0.70f, 0.25f, 0.75f}, {0.15f, 0.75f, 0.80f},
    {0.95f, 0.50f, 0.10f}, {0.40f, 0.25f, 0.10f}};
constexpr float kBackgroundColor[3] = {0.5f, 0.5f, 0.5f};

struct Shape2d {
  int class_id = 0;
  double cy = 0.0;
  double cx = 0.0;
  double hy = 0.0;
  double hx = 0.0;
  bool ellipse = false;

  bool Covers(std::size_t h, std::size_t w) const {
    const double dy = (static_cast<double>(h) + 0.5 - cy) / hy;
    const double dx = (static_cast<double>(w) + 0.5 - cx) / hx;
    if (ellipse) return dx * dx + dy * dy <= 1.0;
    return std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
  }
};

using OwnerMap = std::vector<int>;

std::vector<std::size_t> VisibleCounts(const OwnerMap& owner, std::size_t n) {
  std::vector<std::size_t> counts(n, 0);
  for (int o : owner) {
    if (o != kBackground) ++counts[static_cast<std::size_t>(o)];
  }
  return counts;
}

Tensor OwnerMask(const OwnerMap& owner, int k, std::size_t height,
                 std::size_t width) {
  Tensor mask = Tensor::Zeros({height, width});
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (owner[i] == k) mask[i] = 1.0f;
  }
  return mask;
}

// Square structuring element of radius |r|; r > 0 dilates, r < 0 erodes.
Tensor Morph(const Tensor& mask, int r) {
  if (r == 0) return mask;
  const std::size_t height = mask.dim(0);
  const std::size_t width = mask.dim(1);
  const int radius = std::abs(r);
  const bool dilate = r > 0;
  Tensor out = Tensor::Zeros(mask.shape());
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      bool any = false;
      bool all = true;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const auto y = static_cast<std::ptrdiff_t>(h) + dy;
          const auto x = static_cast<std::ptrdiff_t>(w) + dx;
          const bool inside = y >= 0 && x >= 0 &&
                              y < static_cast<std::ptrdiff_t>(height) &&
                              x < static_cast<std::ptrdiff_t>(width);
          const bool on = inside && mask.at(static_cast<std::size_t>(y),
                                            static_cast<std::size_t>(x)) >= 0.5f;
          any = any || on;
          all = all && on;
        }
      }
      out.at(h, w) = (dilate ? any : all) ? 1.0f : 0.0f;
    }
  }
  return out;
}

std::vector<float> UnitBasis(std::size_t dim, std::size_t axis) {
  std::vector<float> v(dim, 0.0f);
  v[axis] = 1.0f;
  return v;
}

std::vector<float> ClassMean(const SynthSpec& spec, int class_id) {
  if (class_id == kBackground) {
    return spec.background_mean.empty() ? UnitBasis(spec.dim, spec.num_classes)
                                        : spec.background_mean;
  }
  const auto c = static_cast<std::size_t>(class_id);
  return spec.class_means.empty() ? UnitBasis(spec.dim, c) : spec.class_means[c];
}

Shape2d DrawShape(const SynthSpec& spec, Rng& rng,
                  const std::vector<Shape2d>& placed) {
  Shape2d s;
  s.hy = 5.0 + static_cast<double>(rng.UniformInt(8));
  s.hx = 5.0 + static_cast<double>(rng.UniformInt(8));
  s.ellipse = rng.UniformInt(2) == 1;
  const bool near = !placed.empty() && rng.UniformDouble() < spec.neighbor_prob;
  if (near) {
    const Shape2d& anchor = placed[rng.UniformInt(placed.size())];
    s.class_id = anchor.class_id;
    const double angle = rng.Uniform(0.0, 2.0 * M_PI);
    const double reach = rng.Uniform(0.6, 0.9);
    s.cy = anchor.cy + std::sin(angle) * reach * (anchor.hy + s.hy);
    s.cx = anchor.cx + std::cos(angle) * reach * (anchor.hx + s.hx);
  } else {
    s.class_id = static_cast<int>(rng.UniformInt(spec.num_classes));
    s.cy = rng.Uniform(8.0, static_cast<double>(spec.height) - 8.0);
    s.cx = rng.Uniform(8.0, static_cast<double>(spec.width) - 8.0);
  }
  return s;
}

SynthImage GenerateImage(const SynthSpec& spec, Rng& rng, const std::string& id) {
  const std::size_t height = spec.height;
  const std::size_t width = spec.width;
  const std::size_t target =
      spec.min_instances + rng.UniformInt(spec.max_instances - spec.min_instances + 1);

  // Paint shapes in order; a later shape occludes earlier ones. A placement
  // is kept only if every instance stays reasonably visible.
  OwnerMap owner(height * width, kBackground);
  std::vector<Shape2d> shapes;
  for (std::size_t n = 0; n < target; ++n) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const Shape2d s = DrawShape(spec, rng, shapes);
      OwnerMap trial = owner;
      const int k = static_cast<int>(shapes.size());
      for (std::size_t h = 0; h < height; ++h) {
        for (std::size_t w = 0; w < width; ++w) {
          if (s.Covers(h, w)) trial[h * width + w] = k;
        }
      }
      const auto counts = VisibleCounts(trial, shapes.size() + 1);
      if (std::all_of(counts.begin(), counts.end(),
                      [](std::size_t c) { return c >= kMinVisiblePixels; })) {
        owner = std::move(trial);
        shapes.push_back(s);
        break;
      }
    }
  }

  SynthImage out;
  ImageInput& input = out.input;
  input.id = id;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    Tensor mask = OwnerMask(owner, static_cast<int>(k), height, width);
    input.instances.push_back(Instance{shapes[k].class_id, *TightBox(mask)});
    out.gt_masks.push_back(std::move(mask));
  }

  // Features and colors, pixel by pixel in row-major order.
  Tensor features = Tensor::Zeros({height, width, spec.dim});
  Tensor image = Tensor::Zeros({height, width, 3});
  for (std::size_t i = 0; i < owner.size(); ++i) {
    const int o = owner[i];
    const int class_id = o == kBackground ? kBackground : shapes[static_cast<std::size_t>(o)].class_id;
    const std::vector<float> mean = ClassMean(spec, class_id);
    for (std::size_t d = 0; d < spec.dim; ++d) {
      const double noise = spec.noise > 0.0 ? spec.noise * rng.Normal() : 0.0;
      features[i * spec.dim + d] = static_cast<float>(mean[d] + noise);
    }
    const float* color = class_id == kBackground
                             ? kBackgroundColor
                             : kPalette[static_cast<std::size_t>(class_id) % 8];
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = color[c] + kColorNoise * rng.Normal();
      image[3 * i + c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  input.features = L2Normalize(FeatureMap(std::move(features)));
  input.image = std::move(image);

  // Positives: noisy dilations or erosions of the visible mask; some spill
  // onto an overlapping same-class neighbour.
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const Box& gt_box = input.instances[k].box;
    std::optional<std::size_t> neighbour;
    for (std::size_t j = 0; j < shapes.size() && !neighbour; ++j) {
      if (j != k && shapes[j].class_id == shapes[k].class_id &&
          BoxIou(input.instances[j].box, gt_box) > 0.0) {
        neighbour = j;
      }
    }
    for (std::size_t p = 0; p < spec.positives_per_instance; ++p) {
      const int r = static_cast<int>(rng.UniformInt(5)) - 2;
      const bool spill = rng.UniformDouble() < spec.spill_prob && neighbour;
      Tensor base = out.gt_masks[k];
      if (spill) {
        for (std::size_t i = 0; i < base.size(); ++i) {
          base[i] = std::max(base[i], out.gt_masks[*neighbour][i]);
        }
      }
      Tensor binary = Morph(base, r);
      if (!TightBox(binary)) binary = base;
      Tensor pred = Tensor::Zeros({height, width});
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double level = binary[i] >= 0.5f ? 0.85 : 0.1;
        pred[i] = static_cast<float>(level + rng.Uniform(-0.05, 0.05));
      }
      PositiveSample sample;
      sample.anchor_id = "a" + std::to_string(k) + "_" + std::to_string(p);
      sample.gt_instance = k;
      sample.pred_box = TightBox(binary);
      out.positive_ious.push_back(BoxIou(*sample.pred_box, gt_box));
      sample.pred_mask = std::move(pred);
      input.positives.push_back(std::move(sample));
    }
  }
  return out;
}

}  // namespace

void ValidateSynthSpec(const SynthSpec& spec, std::size_t max_classes) {
  if (spec.num_classes == 0) SpecError("num_classes must be positive");
  if (spec.num_classes > max_classes) {
    SpecError(std::to_string(spec.num_classes) + " classes exceed C = " +
              std::to_string(max_classes));
  }
  if (spec.height < 16 || spec.width < 16) SpecError("image must be at least 16 x 16");
  if (spec.dim == 0) SpecError("dim must be positive");
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) SpecError("noise must be >= 0");
  if (spec.min_instances == 0 || spec.min_instances > spec.max_instances) {
    SpecError("need 1 <= min_instances <= max_instances");
  }
  if (spec.images_per_batch == 0) SpecError("images_per_batch must be positive");
  if (!(spec.neighbor_prob >= 0.0 && spec.neighbor_prob <= 1.0) ||
      !(spec.spill_prob >= 0.0 && spec.spill_prob <= 1.0)) {
    SpecError("probabilities must lie in [0, 1]");
  }
  auto check_unit = [&](const std::vector<float>& v, const std::string& what) {
    if (v.size() != spec.dim) SpecError(what + " has the wrong dimension");
    double norm2 = 0.0;
    for (float x : v) norm2 += static_cast<double>(x) * x;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-5) SpecError(what + " is not unit length");
  };
  if (spec.class_means.empty()) {
    if (spec.dim <= spec.num_classes) {
      SpecError("default basis means need dim > num_classes");
    }
  } else {
    if (spec.class_means.size() != spec.num_classes) {
      SpecError("class_means must list one mean per class");
    }
    for (std::size_t c = 0; c < spec.class_means.size(); ++c) {
      check_unit(spec.class_means[c], "class mean " + std::to_string(c));
    }
    if (spec.background_mean.empty()) SpecError("custom means need background_mean");
  }
  if (!spec.background_mean.empty()) check_unit(spec.background_mean, "background mean");
}

SynthSpec ParseSynthSpec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    SpecError(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) SpecError("must be a JSON object");
  SynthSpec spec;
  const auto get = [&](const char* key, auto& field) {
    if (!doc.contains(key)) return;
    try {
      doc.at(key).get_to(field);
    } catch (const json::exception&) {
      SpecError(std::string("key '") + key + "' has the wrong type");
    }
  };
  static const char* kKeys[] = {
      "num_classes", "height", "width", "dim", "noise", "num_batches",
      "images_per_batch", "min_instances", "max_instances",
      "positives_per_instance", "neighbor_prob", "spill_prob", "class_means",
      "background_mean"};
  for (const auto& item : doc.items()) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* k) {
          return item.key() == k;
        }) == std::end(kKeys)) {
      SpecError("unknown key '" + item.key() + "'");
    }
  }
  get("num_classes", spec.num_classes);
  get("height", spec.height);
  get("width", spec.width);
  get("dim", spec.dim);
  get("noise", spec.noise);
  get("num_batches", spec.num_batches);
  get("images_per_batch", spec.images_per_batch);
  get("min_instances", spec.min_instances);
  get("max_instances", spec.max_instances);
  get("positives_per_instance", spec.positives_per_instance);
  get("neighbor_prob", spec.neighbor_prob);
  get("spill_prob", spec.spill_prob);
  get("class_means", spec.class_means);
  get("background_mean", spec.background_mean);
  ValidateSynthSpec(spec, spec.num_classes);
  return spec;
}

SynthSpec LoadSynthSpec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "missing file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSynthSpec(buffer.str());
}

SynthBatch GenerateSynthBatch(const SynthSpec& spec, std::uint64_t seed,
                              std::size_t index) {
  ValidateSynthSpec(spec, spec.num_classes);
  Rng rng(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1)));
  SynthBatch batch;
  for (std::size_t i = 0; i < spec.images_per_batch; ++i) {
    char id[48];
    std::snprintf(id, sizeof(id), "b%04zu_i%03zu", index, i);
    batch.images.push_back(GenerateImage(spec, rng, id));
  }
  return batch;
}

BatchInput ToBatchInput(const SynthBatch& batch) {
  BatchInput out;
  for (const SynthImage& image : batch.images) out.images.push_back(image.input);
  return out;
}

void WriteSynthBatch(const SynthBatch& batch, const fs::path& dir) {
  for (const SynthImage& image : batch.images) {
    const fs::path sub = dir / image.input.id;
    WriteImageInput(image.input, sub);
    for (std::size_t k = 0; k < image.gt_masks.size(); ++k) {
      WriteTensor(image.gt_masks[k], sub / ("gt_" + std::to_string(k) + ".tnsr"));
    }
  }
}

std::vector<Tensor> ReadGroundTruth(const fs::path& image_dir) {
  std::vector<Tensor> masks;
  for (std::size_t k = 0;; ++k) {
    const fs::path path = image_dir / ("gt_" + std::to_string(k) + ".tnsr");
    if (!fs::exists(path)) break;
    masks.push_back(ReadTensor(path));
  }
  return masks;
}

}  // namespace simask
