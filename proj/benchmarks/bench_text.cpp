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

#include "matchbench/text.hpp"

namespace {

void BM_Levenshtein(benchmark::State& state) {
  const std::string a(static_cast<std::size_t>(state.range(0)), 'a');
  std::string b = a;
  for (std::size_t i = 0; i < b.size(); i += 3) b[i] = 'b';
  for (auto _ : state) benchmark::DoNotOptimize(matchbench::levenshtein(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Levenshtein)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void BM_CanonicalizeName(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(matchbench::canonicalize_name("PatientAgeAtDiagnosis_Years2"));
  }
}
BENCHMARK(BM_CanonicalizeName);

void BM_CharTrigrams(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(matchbench::char_trigrams("tumor stage at diagnosis"));
  }
}
BENCHMARK(BM_CharTrigrams);

}  // namespace
