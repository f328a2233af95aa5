// Copyright 2026 The matchbench Authors
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

#include "fixtures.hpp"
#include "matchbench/eval.hpp"

namespace {

void BM_ComputeMetrics(benchmark::State& state) {
  const auto inst = matchbench::fixtures::random_metric_instance(3, 20, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matchbench::compute_metrics(inst.gt, inst.lists, inst.k));
  }
}
BENCHMARK(BM_ComputeMetrics);

void BM_ConsensusSets(benchmark::State& state) {
  const auto inst = matchbench::fixtures::random_metric_instance(5, 20, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matchbench::consensus_sets(inst.gt, inst.lists, inst.k));
  }
}
BENCHMARK(BM_ConsensusSets);

}  // namespace
