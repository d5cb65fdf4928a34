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

#include "cli.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "simask/config.h"
#include "simask/copy_paste.h"
#include "simask/dataset_io.h"
#include "simask/error.h"
#include "simask/pipeline.h"
#include "simask/prototype_bank.h"
#include "simask/rng.h"
#include "simask/synth.h"
#include "simask_checks/criteria.h"

namespace simask::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

Level LevelFromEnv() {
  const char* value = std::getenv("SIM_LOG");
  if (value == nullptr) return Level::kWarn;
  const std::string v = value;
  if (v == "error") return Level::kError;
  if (v == "info") return Level::kInfo;
  if (v == "debug") return Level::kDebug;
  return Level::kWarn;
}

class Logger {
 public:
  Logger(std::ostream& err, Level level) : err_(err), level_(level) {}

  void Log(Level level, const std::string& message) const {
    static const char* kNames[] = {"error", "warn", "info", "debug"};
    if (level <= level_) {
      err_ << "simask: " << kNames[static_cast<int>(level)] << ": " << message << "\n";
    }
  }

 private:
  std::ostream& err_;
  Level level_;
};

int CodeFor(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInvalidArgument: return kInvalidArgument;
    case ErrorCategory::kConfig: return kConfigError;
    case ErrorCategory::kIo: return kIoError;
    case ErrorCategory::kFormat: return kFormatError;
  }
  return kInternal;
}

const char* CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInvalidArgument: return "invalid_argument";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kFormat: return "format";
  }
  return "internal";
}

json ReportJson(const LossReport& report) { return json::parse(LossReportToJson(report)); }

struct GenArgs {
  std::string config;
  std::string input;
  std::string out;
  std::string bank;
  std::string memory;
  int workers = 1;
  std::optional<std::uint64_t> seed;
};

int RunGen(const GenArgs& args, std::ostream& out, const Logger& log) {
  Config config = LoadConfig(args.config);
  if (args.seed) config.seed = *args.seed;
  const BatchInput batch = ReadBatch(args.input);
  if (batch.images.empty()) ThrowInvalid("no image directories under " + args.input);
  log.Log(Level::kInfo, "read " + std::to_string(batch.images.size()) + " images");

  const fs::path bank_dir = args.bank.empty() ? fs::path(args.out) / "bank" : fs::path(args.bank);
  const std::size_t dim = batch.images.front().features.depth();
  PrototypeBank bank = fs::exists(bank_dir / "bank.json")
                           ? LoadPrototypeBank(bank_dir)
                           : PrototypeBank(config.num_classes, config.num_subcenters,
                                           dim, config.gamma);
  if (bank.gamma() != config.gamma) {
    log.Log(Level::kWarn, "bank gamma differs from config; using the bank's value");
  }

  const BatchResult result = GeneratePseudoLabels(batch, bank, config, args.workers);
  WriteBatchResult(result, batch, args.out);
  SavePrototypeBank(bank, bank_dir);

  std::size_t instances = 0;
  json losses = json::array();
  for (const ImageResult& image : result.images) {
    instances += image.instances.size();
    losses.push_back(ReportJson(image.loss));
  }
  json summary;
  summary["command"] = "gen";
  summary["images"] = result.images.size();
  summary["instances"] = instances;
  summary["update_count"] = bank.update_count();
  summary["bank"] = bank_dir.string();
  summary["losses"] = losses;

  if (!args.memory.empty()) {
    MemoryBank memory = fs::exists(fs::path(args.memory) / "manifest.json")
                            ? LoadMemoryBank(args.memory)
                            : MemoryBank(config.bank_capacity);
    for (std::size_t i = 0; i < batch.images.size(); ++i) {
      memory.Push(MakeMemoryEntry(batch.images[i], result.images[i]));
    }
    SaveMemoryBank(memory, args.memory);
    summary["memory_entries"] = memory.size();
  }
  out << summary.dump() << "\n";
  return kOk;
}

int RunProto(const std::string& bank_dir, const std::string& checkpoint,
             std::ostream& out) {
  const PrototypeBank bank = LoadPrototypeBank(bank_dir);
  json summary;
  summary["command"] = "proto";
  summary["num_classes"] = bank.num_classes();
  summary["num_subcenters"] = bank.num_subcenters();
  summary["dim"] = bank.dim();
  summary["gamma"] = bank.gamma();
  summary["update_count"] = bank.update_count();
  json initialized = json::array();
  for (std::size_t c = 0; c < bank.num_classes(); ++c) initialized.push_back(bank.initialized(c));
  summary["initialized"] = initialized;
  if (!checkpoint.empty()) {
    SavePrototypeBank(bank, checkpoint);
    summary["checkpoint"] = checkpoint;
  }
  out << summary.dump() << "\n";
  return kOk;
}

int RunPaste(const std::string& bank_dir, const std::string& target_dir,
             const std::string& out_dir, std::uint64_t seed,
             const std::string& config_path, std::ostream& out) {
  PasteOptions options;
  if (!config_path.empty()) options = LoadConfig(config_path).paste();
  const MemoryBank bank = LoadMemoryBank(bank_dir);
  const BatchInput targets = ReadBatch(target_dir);
  Rng rng(seed);
  std::vector<AugmentedSample> samples;
  std::size_t pasted = 0;
  for (const ImageInput& image : targets.images) {
    TargetSample target;
    target.id = image.id;
    target.image = image.image;
    for (const Instance& inst : image.instances) {
      target.labels.push_back(inst.class_id);
      target.boxes.push_back(inst.box);
    }
    samples.push_back(PasteFromBank(target, bank, rng, options));
    for (bool flag : samples.back().paste_flags) pasted += flag;
  }
  SaveAugmentedSamples(samples, out_dir);
  json summary;
  summary["command"] = "paste";
  summary["samples"] = samples.size();
  summary["pasted_instances"] = pasted;
  summary["seed"] = seed;
  out << summary.dump() << "\n";
  return kOk;
}

int RunLoss(const std::string& config_path, const std::string& input,
            const std::string& labels_dir, std::optional<std::uint64_t> step,
            std::ostream& out) {
  const Config config = LoadConfig(config_path);
  const BatchInput batch = ReadBatch(input);
  for (const ImageInput& image : batch.images) {
    const std::vector<PseudoLabel> labels =
        ReadPseudoLabels(fs::path(labels_dir) / image.id);
    out << LossReportToJson(ComputeLossReport(image, labels, config,
                                              step.value_or(config.warmup_steps)))
        << "\n";
  }
  return kOk;
}

int RunSynth(const std::string& spec_path, const std::string& out_dir,
             std::uint64_t seed, std::optional<std::size_t> batches,
             const std::string& config_path, std::ostream& out) {
  SynthSpec spec = LoadSynthSpec(spec_path);
  if (batches) spec.num_batches = *batches;
  if (!config_path.empty()) {
    ValidateSynthSpec(spec, LoadConfig(config_path).num_classes);
  }
  std::size_t images = 0;
  std::size_t instances = 0;
  for (std::size_t b = 0; b < spec.num_batches; ++b) {
    const SynthBatch batch = GenerateSynthBatch(spec, seed, b);
    char name[32];
    std::snprintf(name, sizeof(name), "batch_%04zu", b);
    WriteSynthBatch(batch, fs::path(out_dir) / name);
    images += batch.images.size();
    for (const SynthImage& image : batch.images) instances += image.gt_masks.size();
  }
  json summary;
  summary["command"] = "synth";
  summary["batches"] = spec.num_batches;
  summary["images"] = images;
  summary["instances"] = instances;
  summary["seed"] = seed;
  out << summary.dump() << "\n";
  return kOk;
}

int RunVerify(const std::vector<int>& ids, std::ostream& out, const Logger& log) {
  bool all_passed = true;
  for (const auto& result : checks::RunCriteria(ids)) {
    json line;
    line["id"] = result.id;
    line["name"] = result.name;
    line["passed"] = result.passed;
    line["seconds"] = result.seconds;
    line["detail"] = result.detail;
    out << line.dump() << "\n";
    log.Log(result.passed ? Level::kInfo : Level::kError, checks::FormatResult(result));
    all_passed = all_passed && result.passed;
  }
  return all_passed ? kOk : kCheckFailed;
}

}  // namespace

int RunCommand(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  const Logger log(err, LevelFromEnv());
  CLI::App app{"simask: pseudo-mask engine for box-supervised instance segmentation"};
  app.require_subcommand(1);

  GenArgs gen;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("gen", "pseudo labels, losses and bank update for one batch");
  gen_cmd->add_option("--config", gen.config, "config JSON")->required();
  gen_cmd->add_option("--input", gen.input, "batch directory")->required();
  gen_cmd->add_option("--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--bank", gen.bank, "prototype bank directory (read and updated)");
  gen_cmd->add_option("--memory", gen.memory, "memory bank directory to push into");
  gen_cmd->add_option("--workers", gen.workers, "worker threads")->check(CLI::PositiveNumber);
  auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "override the config seed");

  std::string proto_bank, proto_out;
  auto* proto_cmd = app.add_subcommand("proto", "inspect or checkpoint a prototype bank");
  proto_cmd->add_option("--bank", proto_bank, "prototype bank directory")->required();
  proto_cmd->add_option("--out", proto_out, "write a checkpoint copy here");

  std::string paste_bank, paste_target, paste_out, paste_config;
  std::uint64_t paste_seed = 0;
  auto* paste_cmd = app.add_subcommand("paste", "Copy-Paste augmentation from a memory bank");
  paste_cmd->add_option("--bank", paste_bank, "memory bank directory")->required();
  paste_cmd->add_option("--target", paste_target, "batch directory of targets")->required();
  paste_cmd->add_option("--out", paste_out, "output directory")->required();
  paste_cmd->add_option("--seed", paste_seed, "random seed");
  paste_cmd->add_option("--config", paste_config, "config JSON (paste_jitter)");

  std::string loss_config, loss_input, loss_labels;
  std::uint64_t loss_step = 0;
  auto* loss_cmd = app.add_subcommand("loss", "recompute losses from pseudo-label files");
  loss_cmd->add_option("--config", loss_config, "config JSON")->required();
  loss_cmd->add_option("--input", loss_input, "batch directory")->required();
  loss_cmd->add_option("--labels", loss_labels, "output directory of gen")->required();
  auto* loss_step_opt = loss_cmd->add_option(
      "--step", loss_step, "training step for warm-up gating (default: after warm-up)");

  std::string synth_spec, synth_out, synth_config;
  std::uint64_t synth_seed = 0;
  std::size_t synth_batches = 0;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset");
  synth_cmd->add_option("--spec", synth_spec, "synthetic spec JSON")->required();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--seed", synth_seed, "random seed");
  auto* synth_batches_opt = synth_cmd->add_option("--batches", synth_batches, "override num_batches");
  synth_cmd->add_option("--config", synth_config, "config JSON to check the class count");

  std::vector<int> verify_ids;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria");
  verify_cmd->add_option("--criterion", verify_ids, "criterion ids (default: all)")
      ->check(CLI::Range(1, 10));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "simask: usage: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*gen_cmd) {
      if (*gen_seed_opt) gen.seed = gen_seed;
      return RunGen(gen, out, log);
    }
    if (*proto_cmd) return RunProto(proto_bank, proto_out, out);
    if (*paste_cmd) {
      return RunPaste(paste_bank, paste_target, paste_out, paste_seed, paste_config, out);
    }
    if (*loss_cmd) {
      return RunLoss(loss_config, loss_input, loss_labels,
                     *loss_step_opt ? std::optional<std::uint64_t>(loss_step) : std::nullopt,
                     out);
    }
    if (*synth_cmd) {
      return RunSynth(synth_spec, synth_out, synth_seed,
                      *synth_batches_opt ? std::optional<std::size_t>(synth_batches)
                                         : std::nullopt,
                      synth_config, out);
    }
    if (*verify_cmd) return RunVerify(verify_ids, out, log);
  } catch (const Error& e) {
    log.Log(Level::kError, std::string(CategoryName(e.category())) + ": " + e.what());
    return CodeFor(e.category());
  } catch (const fs::filesystem_error& e) {
    log.Log(Level::kError, std::string("io: ") + e.what());
    return kIoError;
  } catch (const std::exception& e) {
    log.Log(Level::kError, std::string("internal: ") + e.what());
    return kInternal;
  }
  return kUsage;
}

}  // namespace simask::cli
