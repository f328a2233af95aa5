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

#ifndef MATCHBENCH_PIPELINE_HPP_
#define MATCHBENCH_PIPELINE_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "matchbench/session.hpp"

namespace matchbench {

enum class JobPhase { kPending, kProfiling, kMatching, kDone, kFailed };
std::string_view to_string(JobPhase phase);

struct JobStatus {
  std::string job_id;
  JobPhase phase = JobPhase::kPending;
  std::map<std::string, double> progress;  // matcher id -> fraction
  std::optional<std::string> error;
};

void to_json(nlohmann::json& j, const JobStatus& s);

struct PipelineHooks {
  std::function<void(JobPhase)> on_phase;
  std::function<void(const std::string& matcher, double fraction)> on_progress;
  // Runs a session mutation under the caller's writer lock. Defaults to a
  // plain call.
  std::function<void(const std::function<void()>&)> exclusive;
  bool easy_matches = true;
};

// Runs easy-match detection and every matcher registered by begin_task,
// merging each result as soon as it completes, then finishes the task.
// Throws Error(kEngine) when every matcher fails; the session records why.
void run_task_pipeline(Session& session, const PipelineHooks& hooks = {});

}  // namespace matchbench

#endif  // MATCHBENCH_PIPELINE_HPP_
