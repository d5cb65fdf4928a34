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

#ifndef SIMASK_DATASET_IO_H_
#define SIMASK_DATASET_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "simask/pipeline.h"

namespace simask {

// Per-image directory layout:
//   image.tnsr        H x W x 3
//   features.tnsr     H x W x D (normalized on load)
//   annotations.json  {"instances": [{"class", "box": [x0, y0, x1, y1],
//                      "pasted"?, "paste_mask"?}], "prediction_source"?,
//                      "lowlevel"?}
//   positives.json    {"positives": [{"anchor_id", "gt_instance", "mask",
//                      "box"?}]} with "mask" naming a .tnsr in the directory
// The image id is the directory name.
ImageInput ReadImageInput(const std::filesystem::path& dir);
void WriteImageInput(const ImageInput& image, const std::filesystem::path& dir);

// Every subdirectory holding annotations.json, in name order.
BatchInput ReadBatch(const std::filesystem::path& dir);

// Writes inst_<k>_{prob,hard,weight}.tnsr, Msem_<class>.tnsr for each
// semantic map, and index.json into `dir`.
void WriteImageResult(const ImageResult& result, const ImageInput& image,
                      const std::filesystem::path& dir);
std::vector<PseudoLabel> ReadPseudoLabels(const std::filesystem::path& dir);

// One image per subdirectory of `dir`, plus losses.jsonl with one line per
// image.
void WriteBatchResult(const BatchResult& result, const BatchInput& batch,
                      const std::filesystem::path& dir);

// Single-line JSON object for one loss report.
std::string LossReportToJson(const LossReport& report);

}  // namespace simask

#endif  // SIMASK_DATASET_IO_H_
