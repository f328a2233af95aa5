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

#ifndef MATCHBENCH_BENCHMARK_REPORT_HPP_
#define MATCHBENCH_BENCHMARK_REPORT_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/engine.hpp"
#include "matchbench/session.hpp"

namespace matchbench {

// {"metrics": MetricsReport, "breakdown": RankBreakdown, "consensus": ConsensusReport}
// for the session's current ground truth. The HTTP endpoints serve the same
// three members individually.
nlohmann::json benchmark_document(const Session& session, std::size_t k);

struct BenchmarkOptions {
  std::string source_csv;
  std::string target_csv;
  bool target_is_schema = false;
  std::string ground_truth_csv;  // source,target,label[,actor,timestamp]
  std::vector<MatcherSpec> matchers;
  EngineConfig config;
  std::size_t k = 10;
};

// Headless pipeline: profile, run every matcher, load the ground truth as the
// only decisions (no auto-acceptance), and report. Throws on any failure,
// including ground-truth rows that name unknown attributes or conflict.
nlohmann::json run_benchmark(const BenchmarkOptions& options);

}  // namespace matchbench

#endif  // MATCHBENCH_BENCHMARK_REPORT_HPP_
