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
#include "matchbench/engine.hpp"
#include "matchbench/ingest.hpp"

namespace {

struct ScaleContext {
  matchbench::Dataset source;
  matchbench::Dataset target;
  std::unique_ptr<matchbench::MatchContext> ctx;

  ScaleContext() {
    const auto f = matchbench::fixtures::scale_task(179, 736, 100);
    source = matchbench::load_csv(f.source_csv, matchbench::Side::kSource);
    target = matchbench::load_csv(f.target_csv, matchbench::Side::kTarget);
    matchbench::annotate_dataset(source);
    matchbench::annotate_dataset(target);
    ctx = std::make_unique<matchbench::MatchContext>(source, target);
  }
};

const ScaleContext& scale() {
  static const ScaleContext s;
  return s;
}

void BM_BuiltinMatcher(benchmark::State& state) {
  const auto id = matchbench::kBuiltinMatchers[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(std::string(id));
  const auto& ctx = *scale().ctx;
  for (auto _ : state) benchmark::DoNotOptimize(matchbench::run_builtin_matcher(ctx, id, 10));
}
BENCHMARK(BM_BuiltinMatcher)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_EasyMatches(benchmark::State& state) {
  const auto& ctx = *scale().ctx;
  const matchbench::EngineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(matchbench::detect_easy_matches(ctx, cfg));
}
BENCHMARK(BM_EasyMatches)->Unit(benchmark::kMillisecond);

void BM_BuildContext(benchmark::State& state) {
  const auto& s = scale();
  for (auto _ : state) benchmark::DoNotOptimize(matchbench::MatchContext(s.source, s.target));
}
BENCHMARK(BM_BuildContext)->Unit(benchmark::kMillisecond);

}  // namespace
