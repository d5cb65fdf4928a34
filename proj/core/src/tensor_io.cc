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

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "simask/error.h"
#include "simask/tensor.h"

namespace simask {
namespace {

constexpr char kMagic[8] = {'S', 'I', 'M', 'T', 'N', 'S', 'R', '\0'};

[[noreturn]] void FormatError(const std::string& message) {
  throw Error(ErrorCategory::kFormat, message);
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xffu);
}

std::uint32_t GetU32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

}  // namespace

std::vector<std::uint8_t> EncodeTensor(const Tensor& tensor) {
  nlohmann::json header;
  header["dtype"] = "f32";
  header["shape"] = tensor.shape();
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(sizeof(kMagic));
  out.reserve(sizeof(kMagic) + 4 + text.size() + 4 * tensor.size());
  std::memcpy(out.data(), kMagic, sizeof(kMagic));
  PutU32(out, static_cast<std::uint32_t>(text.size()));
  for (char ch : text) out.push_back(static_cast<std::uint8_t>(ch));
  for (float v : tensor.data()) {
    PutU32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

Tensor DecodeTensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) + 4 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    FormatError("bad magic");
  }
  const std::uint32_t header_len = GetU32(bytes.data() + sizeof(kMagic));
  const std::size_t payload_begin = sizeof(kMagic) + 4 + header_len;
  if (payload_begin > bytes.size()) FormatError("truncated header");

  const std::string_view text(
      reinterpret_cast<const char*>(bytes.data() + sizeof(kMagic) + 4),
      header_len);
  Shape shape;
  try {
    const auto header = nlohmann::json::parse(text);
    if (header.at("dtype").get<std::string>() != "f32") {
      FormatError("unsupported dtype " + header.at("dtype").dump());
    }
    shape = header.at("shape").get<Shape>();
  } catch (const nlohmann::json::exception& e) {
    FormatError(std::string("bad header: ") + e.what());
  }

  const std::size_t payload_bytes = bytes.size() - payload_begin;
  const std::size_t expected = NumElements(shape);
  if (payload_bytes % 4 != 0 || payload_bytes / 4 != expected) {
    FormatError("payload length mismatch: shape holds " +
                std::to_string(expected) + " values, file holds " +
                std::to_string(payload_bytes / 4) +
                (payload_bytes % 4 ? " plus a partial value" : ""));
  }

  std::vector<float> data(expected);
  const std::uint8_t* p = bytes.data() + payload_begin;
  for (std::size_t i = 0; i < expected; ++i, p += 4) {
    data[i] = std::bit_cast<float>(GetU32(p));
    if (!std::isfinite(data[i])) {
      FormatError("non-finite value at index " + std::to_string(i));
    }
  }
  return Tensor(std::move(shape), std::move(data));
}

Tensor ReadTensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCategory::kIo, "missing file: " + path.string());
  }
  const std::vector<std::uint8_t> bytes(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return DecodeTensor(bytes);
  } catch (const Error& e) {
    throw Error(e.category(), path.string() + ": " + e.what());
  }
}

void WriteTensor(const Tensor& tensor, const std::filesystem::path& path) {
  const auto bytes = EncodeTensor(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCategory::kIo, "cannot open for writing: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCategory::kIo, "write failed: " + path.string());
}

}  // namespace simask
