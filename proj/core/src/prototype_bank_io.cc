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

#include <fstream>

#include <nlohmann/json.hpp>

#include "simask/error.h"
#include "simask/prototype_bank.h"

namespace simask {

namespace fs = std::filesystem;

void SavePrototypeBank(const PrototypeBank& bank, const fs::path& dir) {
  fs::create_directories(dir);
  WriteTensor(bank.prototypes(), dir / "prototypes.tnsr");

  nlohmann::json sidecar;
  std::vector<bool> initialized;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t c = 0; c < bank.num_classes(); ++c) {
    initialized.push_back(bank.initialized(c));
    std::vector<bool> row;
    for (std::size_t l = 0; l < bank.num_subcenters(); ++l) {
      row.push_back(bank.row_set(c, l));
    }
    rows.push_back(row);
  }
  sidecar["initialized"] = initialized;
  sidecar["gamma"] = bank.gamma();
  sidecar["update_count"] = bank.update_count();
  sidecar["rows_set"] = rows;

  std::ofstream out(dir / "bank.json");
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + (dir / "bank.json").string());
  out << sidecar.dump(2) << "\n";
}

PrototypeBank LoadPrototypeBank(const fs::path& dir) {
  Tensor prototypes = ReadTensor(dir / "prototypes.tnsr");
  std::ifstream in(dir / "bank.json");
  if (!in) throw Error(ErrorCategory::kIo, "missing file: " + (dir / "bank.json").string());
  try {
    const auto sidecar = nlohmann::json::parse(in);
    const auto initialized = sidecar.at("initialized").get<std::vector<bool>>();
    if (prototypes.rank() != 3 || initialized.size() != prototypes.dim(0)) {
      throw Error(ErrorCategory::kFormat, "bank.json does not match prototypes.tnsr");
    }
    const std::size_t num_sub = prototypes.dim(1);
    std::vector<bool> rows_set;
    if (sidecar.contains("rows_set")) {
      for (const auto& row : sidecar.at("rows_set")) {
        const auto flags = row.get<std::vector<bool>>();
        if (flags.size() != num_sub) {
          throw Error(ErrorCategory::kFormat, "rows_set row has wrong length");
        }
        rows_set.insert(rows_set.end(), flags.begin(), flags.end());
      }
    } else {
      for (bool init : initialized) rows_set.insert(rows_set.end(), num_sub, init);
    }
    return PrototypeBank::FromState(std::move(prototypes), std::move(rows_set),
                                    sidecar.at("gamma").get<double>(),
                                    sidecar.at("update_count").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kFormat, std::string("bank.json: ") + e.what());
  }
}

}  // namespace simask
