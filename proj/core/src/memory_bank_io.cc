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

#include <cstdio>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "simask/copy_paste.h"
#include "simask/error.h"

namespace simask {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json BoxesToJson(const std::vector<Box>& boxes) {
  json out = json::array();
  for (const Box& b : boxes) out.push_back({b.x0, b.y0, b.x1, b.y1});
  return out;
}

std::vector<Box> BoxesFromJson(const json& j) {
  std::vector<Box> out;
  for (const auto& b : j) {
    const auto v = b.get<std::vector<double>>();
    if (v.size() != 4) throw Error(ErrorCategory::kFormat, "box needs 4 coordinates");
    Box box{v[0], v[1], v[2], v[3]};
    ValidateBox(box);
    out.push_back(box);
  }
  return out;
}

std::string EntryPrefix(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "entry_%04zu", index);
  return buf;
}

void RemoveStaleEntryFiles(const fs::path& dir) {
  for (const auto& file : fs::directory_iterator(dir)) {
    const std::string name = file.path().filename().string();
    if (name.rfind("entry_", 0) == 0 && file.path().extension() == ".tnsr") {
      fs::remove(file.path());
    }
  }
}

// Writes image and masks, returning the manifest record without flags.
json WriteRecord(const fs::path& dir, std::size_t index, const std::string& id,
                 const Tensor& image, const std::vector<int>& labels,
                 const std::vector<Box>& boxes, const std::vector<Tensor>& masks) {
  const std::string prefix = EntryPrefix(index);
  json record;
  record["id"] = id;
  record["labels"] = labels;
  record["boxes"] = BoxesToJson(boxes);
  record["image"] = prefix + "_image.tnsr";
  WriteTensor(image, dir / record["image"].get<std::string>());
  json mask_files = json::array();
  for (std::size_t k = 0; k < masks.size(); ++k) {
    const std::string name = prefix + "_mask_" + std::to_string(k) + ".tnsr";
    WriteTensor(masks[k], dir / name);
    mask_files.push_back(name);
  }
  record["masks"] = mask_files;
  return record;
}

json ReadManifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(ErrorCategory::kIo, "missing file: " + (dir / "manifest.json").string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kFormat, std::string("manifest.json: ") + e.what());
  }
}

void WriteManifest(const fs::path& dir, const json& manifest) {
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

std::vector<Tensor> ReadMasks(const fs::path& dir, const json& record) {
  std::vector<Tensor> masks;
  for (const auto& name : record.at("masks")) {
    masks.push_back(ReadTensor(dir / name.get<std::string>()));
  }
  return masks;
}

}  // namespace

void SaveMemoryBank(const MemoryBank& bank, const fs::path& dir) {
  fs::create_directories(dir);
  RemoveStaleEntryFiles(dir);
  json manifest;
  manifest["capacity"] = bank.capacity();
  manifest["entries"] = json::array();
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const MemoryBankEntry& e = bank.at(i);
    json record = WriteRecord(dir, i, e.id, e.image, e.labels, e.boxes, e.masks);
    record["scores"] = e.scores;
    manifest["entries"].push_back(std::move(record));
  }
  WriteManifest(dir, manifest);
}

MemoryBank LoadMemoryBank(const fs::path& dir) {
  const json manifest = ReadManifest(dir);
  try {
    MemoryBank bank(manifest.at("capacity").get<std::size_t>());
    for (const auto& record : manifest.at("entries")) {
      MemoryBankEntry entry;
      entry.id = record.at("id").get<std::string>();
      entry.image = ReadTensor(dir / record.at("image").get<std::string>());
      entry.labels = record.at("labels").get<std::vector<int>>();
      entry.boxes = BoxesFromJson(record.at("boxes"));
      entry.masks = ReadMasks(dir, record);
      entry.scores = record.at("scores").get<std::vector<double>>();
      bank.Push(std::move(entry));
    }
    return bank;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kFormat, std::string("manifest.json: ") + e.what());
  }
}

void SaveAugmentedSamples(std::span<const AugmentedSample> samples,
                          const fs::path& dir) {
  fs::create_directories(dir);
  RemoveStaleEntryFiles(dir);
  json manifest;
  manifest["entries"] = json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const AugmentedSample& s = samples[i];
    json record = WriteRecord(dir, i, s.id, s.image, s.labels, s.boxes, s.masks);
    record["source_id"] = s.source_id;
    record["paste_flags"] = s.paste_flags;
    manifest["entries"].push_back(std::move(record));
  }
  WriteManifest(dir, manifest);
}

std::vector<AugmentedSample> LoadAugmentedSamples(const fs::path& dir) {
  const json manifest = ReadManifest(dir);
  std::vector<AugmentedSample> out;
  try {
    for (const auto& record : manifest.at("entries")) {
      AugmentedSample s;
      s.id = record.at("id").get<std::string>();
      s.source_id = record.value("source_id", "");
      s.image = ReadTensor(dir / record.at("image").get<std::string>());
      s.labels = record.at("labels").get<std::vector<int>>();
      s.boxes = BoxesFromJson(record.at("boxes"));
      s.masks = ReadMasks(dir, record);
      s.paste_flags = record.at("paste_flags").get<std::vector<bool>>();
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kFormat, std::string("manifest.json: ") + e.what());
  }
  return out;
}

}  // namespace simask
