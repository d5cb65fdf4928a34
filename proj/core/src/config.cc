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

#include "simask/config.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simask/error.h"

namespace simask {
namespace {

using nlohmann::json;

[[noreturn]] void ConfigError(const std::string& message) {
  throw Error(ErrorCategory::kConfig, message);
}

bool InUnit(double x) { return x >= 0.0 && x <= 1.0; }

// Applies `fn` to every (key, field) pair so parsing and serialization share
// one key list.
template <typename C, typename Fn>
void ForEachField(C& c, Fn&& fn) {
  fn("num_classes", c.num_classes);
  fn("num_subcenters", c.num_subcenters);
  fn("gamma", c.gamma);
  fn("alpha", c.alpha);
  fn("mu", c.mu);
  fn("tau", c.tau);
  fn("tau_low", c.tau_low);
  fn("tau_high", c.tau_high);
  fn("epsilon", c.epsilon);
  fn("sinkhorn_max_iter", c.sinkhorn_max_iter);
  fn("sinkhorn_tol", c.sinkhorn_tol);
  fn("lambda1", c.lambda1);
  fn("lambda2", c.lambda2);
  fn("warmup_steps", c.warmup_steps);
  fn("bank_capacity", c.bank_capacity);
  fn("seed", c.seed);
  fn("lowlevel_enabled", c.lowlevel_enabled);
  fn("pairwise_theta", c.pairwise_theta);
  fn("pairwise_sigma", c.pairwise_sigma);
  fn("paste_jitter", c.paste_jitter);
}

}  // namespace

void ValidateConfig(const Config& c) {
  if (c.num_classes == 0) ConfigError("num_classes must be positive");
  if (c.num_subcenters == 0) ConfigError("num_subcenters must be positive");
  if (!InUnit(c.gamma)) ConfigError("gamma must lie in [0, 1]");
  if (!InUnit(c.alpha)) ConfigError("alpha must lie in [0, 1]");
  if (!std::isfinite(c.mu)) ConfigError("mu must be finite");
  if (!(c.tau > 0.0)) ConfigError("tau must be positive");
  if (!(0.0 <= c.tau_low && c.tau_low <= c.tau_high && c.tau_high <= 1.0)) {
    ConfigError("thresholds must satisfy 0 <= tau_low <= tau_high <= 1");
  }
  if (!(c.epsilon > 0.0)) ConfigError("epsilon must be positive");
  if (c.sinkhorn_max_iter <= 0) ConfigError("sinkhorn_max_iter must be positive");
  if (!(c.sinkhorn_tol >= 0.0)) ConfigError("sinkhorn_tol must be nonnegative");
  if (!(c.lambda1 >= 0.0) || !(c.lambda2 >= 0.0)) {
    ConfigError("lambda1 and lambda2 must be nonnegative");
  }
  if (c.bank_capacity == 0) ConfigError("bank_capacity must be positive");
  if (!(c.pairwise_sigma > 0.0)) ConfigError("pairwise_sigma must be positive");
  if (!InUnit(c.pairwise_theta)) ConfigError("pairwise_theta must lie in [0, 1]");
}

Config ParseConfig(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) ConfigError("config must be a JSON object");

  Config config;
  std::size_t known = 0;
  ForEachField(config, [&](const char* key, auto& field) {
    if (!doc.contains(key)) return;
    ++known;
    try {
      doc.at(key).get_to(field);
    } catch (const json::exception&) {
      ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
  });
  if (known != doc.size()) {
    for (const auto& item : doc.items()) {
      bool found = false;
      ForEachField(config, [&](const char* key, auto&) {
        found = found || item.key() == key;
      });
      if (!found) ConfigError("unknown config key '" + item.key() + "'");
    }
  }
  if (!doc.contains("num_classes")) ConfigError("config needs num_classes");
  ValidateConfig(config);
  return config;
}

Config LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "missing file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::string ConfigToJson(const Config& config) {
  json doc;
  ForEachField(config, [&](const char* key, const auto& field) { doc[key] = field; });
  return doc.dump(2);
}

LossWeights EffectiveLossWeights(const Config& config, std::uint64_t step) {
  if (step < config.warmup_steps) return {};
  return {config.lambda1, config.lambda2};
}

}  // namespace simask
