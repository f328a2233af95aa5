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

#include "matchbench/benchmark_report.hpp"

#include "matchbench/error.hpp"
#include "matchbench/pipeline.hpp"

namespace matchbench {

nlohmann::json benchmark_document(const Session& session, std::size_t k) {
  return nlohmann::json{{"metrics", session.metrics(k)},
                        {"breakdown", session.breakdown()},
                        {"consensus", session.consensus(k)}};
}

nlohmann::json run_benchmark(const BenchmarkOptions& options) {
  if (options.matchers.empty()) throw Error(ErrorCode::kValidation, "no matchers given");
  Session session("benchmark");
  session.begin_task(TaskData::build(options.source_csv, options.target_csv,
                                     options.target_is_schema),
                     options.config, options.matchers);
  PipelineHooks hooks;
  hooks.easy_matches = false;
  run_task_pipeline(session, hooks);

  const ImportReport imported =
      session.import_artifact(ImportKind::kGroundTruthCsv, options.ground_truth_csv);
  if (imported.partial_failure()) {
    std::string detail;
    for (const auto& s : imported.skipped) detail += "\n  " + s;
    for (const auto& c : imported.conflicts) detail += "\n  " + c;
    throw Error(ErrorCode::kValidation, "ground truth rejected:" + detail);
  }
  auto doc = benchmark_document(session, options.k);
  doc["matchers"] = session.state().matchers;
  return doc;
}

}  // namespace matchbench
