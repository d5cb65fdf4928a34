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

#include "simask/dataset_io.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "simask/error.h"

namespace simask {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "missing file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kFormat, path.string() + ": " + e.what());
  }
}

void WriteJson(const json& doc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

Box BoxFromJson(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw Error(ErrorCategory::kFormat, "box needs 4 coordinates");
  return Box{v[0], v[1], v[2], v[3]};
}

json BoxToJson(const Box& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

std::string IndexedName(const char* pattern, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, k);
  return buf;
}

}  // namespace

ImageInput ReadImageInput(const fs::path& dir) {
  ImageInput image;
  image.id = dir.filename().string();
  image.image = ReadTensor(dir / "image.tnsr");
  image.features = L2Normalize(FeatureMap(ReadTensor(dir / "features.tnsr")));

  const json annotations = ReadJson(dir / "annotations.json");
  const json positives = ReadJson(dir / "positives.json");
  try {
    bool any_pasted = false;
    for (const auto& inst : annotations.at("instances")) {
      image.instances.push_back(
          Instance{inst.at("class").get<int>(), BoxFromJson(inst.at("box"))});
      const bool pasted = inst.value("pasted", false);
      any_pasted = any_pasted || pasted;
      image.pasted.push_back(pasted);
      image.paste_masks.push_back(
          pasted ? ReadTensor(dir / inst.at("paste_mask").get<std::string>())
                 : Tensor());
    }
    if (!any_pasted) {
      image.pasted.clear();
      image.paste_masks.clear();
    }
    image.prediction_source = annotations.value("prediction_source", "online");
    if (annotations.contains("lowlevel")) {
      image.external_lowlevel = annotations.at("lowlevel").get<double>();
    }
    for (const auto& p : positives.at("positives")) {
      PositiveSample sample;
      sample.anchor_id = p.value("anchor_id", "");
      sample.gt_instance = p.at("gt_instance").get<std::size_t>();
      sample.pred_mask = ReadTensor(dir / p.at("mask").get<std::string>());
      if (p.contains("box")) sample.pred_box = BoxFromJson(p.at("box"));
      image.positives.push_back(std::move(sample));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kFormat,
                (dir / "annotations.json").string() + ": " + e.what());
  }
  return image;
}

void WriteImageInput(const ImageInput& image, const fs::path& dir) {
  fs::create_directories(dir);
  WriteTensor(image.image, dir / "image.tnsr");
  WriteTensor(image.features.tensor(), dir / "features.tnsr");

  json annotations;
  annotations["instances"] = json::array();
  for (std::size_t k = 0; k < image.instances.size(); ++k) {
    json inst;
    inst["class"] = image.instances[k].class_id;
    inst["box"] = BoxToJson(image.instances[k].box);
    if (k < image.pasted.size() && image.pasted[k]) {
      inst["pasted"] = true;
      inst["paste_mask"] = IndexedName("paste_%03zu.tnsr", k);
      WriteTensor(image.paste_masks[k], dir / inst["paste_mask"].get<std::string>());
    }
    annotations["instances"].push_back(std::move(inst));
  }
  annotations["prediction_source"] = image.prediction_source;
  if (image.external_lowlevel) annotations["lowlevel"] = *image.external_lowlevel;
  WriteJson(annotations, dir / "annotations.json");

  json positives;
  positives["positives"] = json::array();
  for (std::size_t j = 0; j < image.positives.size(); ++j) {
    const PositiveSample& p = image.positives[j];
    json entry;
    entry["anchor_id"] = p.anchor_id;
    entry["gt_instance"] = p.gt_instance;
    entry["mask"] = IndexedName("pos_%03zu.tnsr", j);
    if (p.pred_box) entry["box"] = BoxToJson(*p.pred_box);
    WriteTensor(p.pred_mask, dir / entry["mask"].get<std::string>());
    positives["positives"].push_back(std::move(entry));
  }
  WriteJson(positives, dir / "positives.json");
}

BatchInput ReadBatch(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCategory::kIo, "missing directory: " + dir.string());
  }
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "annotations.json")) {
      subdirs.push_back(entry.path());
    }
  }
  std::sort(subdirs.begin(), subdirs.end());
  BatchInput batch;
  for (const fs::path& sub : subdirs) batch.images.push_back(ReadImageInput(sub));
  return batch;
}

void WriteImageResult(const ImageResult& result, const ImageInput& image,
                      const fs::path& dir) {
  fs::create_directories(dir);
  json index;
  index["image"] = result.id;
  index["instances"] = json::array();
  for (std::size_t k = 0; k < result.instances.size(); ++k) {
    const InstanceResult& r = result.instances[k];
    WriteTensor(r.label.prob, dir / IndexedName("inst_%zu_prob.tnsr", k));
    WriteTensor(r.label.hard, dir / IndexedName("inst_%zu_hard.tnsr", k));
    WriteTensor(r.label.weight, dir / IndexedName("inst_%zu_weight.tnsr", k));
    json inst;
    inst["id"] = k;
    inst["class"] = image.instances[k].class_id;
    inst["box"] = BoxToJson(image.instances[k].box);
    inst["semantic"] = r.semantic_used;
    inst["has_positives"] = r.instance_map.has_value();
    inst["score"] = r.importance;
    index["instances"].push_back(std::move(inst));
  }
  json semantic = json::array();
  for (const auto& [class_id, map] : result.semantic_maps) {
    const std::string name = IndexedName("Msem_%zu.tnsr", static_cast<std::size_t>(class_id));
    WriteTensor(map->probs, dir / name);
    semantic.push_back(name);
  }
  index["semantic_maps"] = semantic;
  index["prediction_source"] = image.prediction_source;
  WriteJson(index, dir / "index.json");
}

std::vector<PseudoLabel> ReadPseudoLabels(const fs::path& dir) {
  const json index = ReadJson(dir / "index.json");
  std::vector<PseudoLabel> labels;
  try {
    for (std::size_t k = 0; k < index.at("instances").size(); ++k) {
      labels.push_back(PseudoLabel{
          ReadTensor(dir / IndexedName("inst_%zu_prob.tnsr", k)),
          ReadTensor(dir / IndexedName("inst_%zu_hard.tnsr", k)),
          ReadTensor(dir / IndexedName("inst_%zu_weight.tnsr", k))});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kFormat, (dir / "index.json").string() + ": " + e.what());
  }
  return labels;
}

void WriteBatchResult(const BatchResult& result, const BatchInput& batch,
                      const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream losses(dir / "losses.jsonl");
  if (!losses) throw Error(ErrorCategory::kIo, "cannot write " + (dir / "losses.jsonl").string());
  for (std::size_t i = 0; i < result.images.size(); ++i) {
    WriteImageResult(result.images[i], batch.images[i], dir / result.images[i].id);
    losses << LossReportToJson(result.images[i].loss) << "\n";
  }
}

std::string LossReportToJson(const LossReport& report) {
  json doc;
  doc["image"] = report.image;
  doc["lowlevel"] = report.lowlevel;
  doc["pseudo"] = report.pseudo;
  doc["paste"] = report.paste;
  doc["lambda1"] = report.lambda1;
  doc["lambda2"] = report.lambda2;
  doc["total"] = report.total;
  return doc.dump();
}

}  // namespace simask
