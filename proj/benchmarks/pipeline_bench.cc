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

#include <benchmark/benchmark.h>

#include "simask/config.h"
#include "simask/pipeline.h"
#include "simask/synth.h"

namespace simask {
namespace {

// One synthetic batch through the full pipeline on a warmed-up bank.
void BM_GeneratePseudoLabels(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  SynthSpec spec;
  Config config;
  config.num_classes = spec.num_classes;
  PrototypeBank warm(config.num_classes, config.num_subcenters, spec.dim, config.gamma);
  GeneratePseudoLabels(ToBatchInput(GenerateSynthBatch(spec, 1, 0)), warm, config);
  const BatchInput batch = ToBatchInput(GenerateSynthBatch(spec, 1, 1));
  for (auto _ : state) {
    state.PauseTiming();
    PrototypeBank bank = warm;
    state.ResumeTiming();
    BatchResult result = GeneratePseudoLabels(batch, bank, config, workers);
    benchmark::DoNotOptimize(result.images.data());
  }
}
BENCHMARK(BM_GeneratePseudoLabels)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace simask
