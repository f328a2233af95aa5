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

#include "matchbench/pipeline.hpp"

#include <future>
#include <mutex>
#include <vector>

#include "matchbench/error.hpp"

namespace matchbench {

std::string_view to_string(JobPhase phase) {
  switch (phase) {
    case JobPhase::kPending: return "pending";
    case JobPhase::kProfiling: return "profiling";
    case JobPhase::kMatching: return "matching";
    case JobPhase::kDone: return "done";
    case JobPhase::kFailed: return "failed";
  }
  return "unknown";
}

void to_json(nlohmann::json& j, const JobStatus& s) {
  j = nlohmann::json{{"job_id", s.job_id}, {"phase", to_string(s.phase)},
                     {"progress", s.progress}};
  if (s.error) j["error"] = *s.error;
}

void run_task_pipeline(Session& session, const PipelineHooks& hooks) {
  // Matcher threads merge concurrently; serialize them even without a hook.
  std::mutex merge_mutex;
  auto exclusive = [&](const std::function<void()>& fn) {
    std::lock_guard lock(merge_mutex);
    if (hooks.exclusive) {
      hooks.exclusive(fn);
    } else {
      fn();
    }
  };
  auto phase = [&](JobPhase p) {
    if (hooks.on_phase) hooks.on_phase(p);
  };
  auto progress = [&](const std::string& id, double f) {
    if (hooks.on_progress) hooks.on_progress(id, f);
  };

  std::shared_ptr<const TaskData> task;
  std::vector<MatcherSpec> specs;
  EngineConfig config;
  exclusive([&] {
    task = session.task_ptr();
    specs = session.state().matchers;
    config = session.state().config;
  });
  if (!task) throw Error(ErrorCode::kNotReady, "session has no task");

  phase(JobPhase::kProfiling);
  if (hooks.easy_matches) exclusive([&] { session.apply_easy_matches(); });

  phase(JobPhase::kMatching);
  const MatchContext& ctx = *task->context;
  std::vector<std::future<void>> running;
  running.reserve(specs.size());
  for (const auto& spec : specs) {
    running.push_back(std::async(std::launch::async, [&, spec]() {
      progress(spec.id, 0.0);
      PluginRun run;
      if (spec.kind == MatcherKind::kBuiltin) {
        run.spec = spec;
        try {
          run.ranking = run_builtin_matcher(ctx, spec.id, spec.top_k,
                                            [&](double f) { progress(spec.id, f); });
          run.spec.status = MatcherStatus::kReady;
        } catch (const std::exception& e) {
          run.spec.status = MatcherStatus::kFailed;
          run.spec.failure_reason = e.what();
        }
      } else {
        run = run_external_matcher(spec, ctx, config.plugin_timeout);
      }
      exclusive([&] { session.merge_matcher_result(run); });
      progress(spec.id, 1.0);
    }));
  }
  for (auto& f : running) f.get();

  try {
    exclusive([&] { session.finish_task(); });
  } catch (...) {
    phase(JobPhase::kFailed);
    throw;
  }
  phase(JobPhase::kDone);
}

}  // namespace matchbench
