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

#ifndef MATCHBENCH_PLUGIN_HPP_
#define MATCHBENCH_PLUGIN_HPP_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/engine.hpp"
#include "matchbench/matchers.hpp"

namespace matchbench {

// Line-delimited JSON over the child's stdio:
//   host -> plugin  {"op":"top_matches","k":K,"source":[...],"target":[...]}
//   plugin -> host  {"source":"<name>","matches":[{"target":"<name>","score":s}]}
//                   ... one line per source ...
//                   {"op":"done"}
// followed by exit code 0.
nlohmann::json build_top_matches_request(const MatchContext& ctx, std::size_t k);

// Validates plugin stdout and converts it into a ranking (lists re-sorted by
// score then target name). Throws Error(kPlugin) naming the violation, e.g.
// "score out of range". Sets *saw_done when the terminating line was read.
MatcherRanking parse_top_matches_response(std::string_view output,
                                          const MatchContext& ctx,
                                          const std::string& matcher_id,
                                          std::size_t k, bool* saw_done = nullptr);

struct PluginRun {
  MatcherSpec spec;  // status ready or failed, with failure_reason
  std::optional<MatcherRanking> ranking;
  std::string stderr_tail;
};

// Launches spec.command, performs one top_matches exchange, and never throws
// for plugin misbehaviour: every failure is reported through spec.status.
PluginRun run_external_matcher(MatcherSpec spec, const MatchContext& ctx,
                               std::chrono::duration<double> timeout);

// Maps runner ids to argv templates; "{file}" is replaced by the path of the
// persisted code blob.
class RunnerTable {
 public:
  // python -> python3 {file}; sh -> /bin/sh {file}
  static RunnerTable defaults();
  // {"runner-id": ["argv0", "{file}", ...], ...}
  static RunnerTable from_json(const nlohmann::json& j);

  void set(std::string id, std::vector<std::string> argv_template);
  // Entries in `other` replace same-named ones here.
  void merge(const RunnerTable& other);
  bool contains(std::string_view id) const;
  // Throws Validation for unknown runners.
  std::vector<std::string> command_for(std::string_view id,
                                       const std::filesystem::path& file) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> runners_;
};

}  // namespace matchbench

#endif  // MATCHBENCH_PLUGIN_HPP_
