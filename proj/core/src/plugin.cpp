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

#include "matchbench/plugin.hpp"

#include <cmath>
#include <set>

#include "matchbench/error.hpp"
#include "matchbench/process.hpp"
#include "matchbench/text.hpp"

namespace matchbench {
namespace {

nlohmann::json describe(const AttributeFeatures& f) {
  nlohmann::json j{{"name", f.name},
                   {"type", to_string(f.type)},
                   {"samples", f.samples}};
  if (f.description) j["description"] = *f.description;
  return j;
}

[[noreturn]] void violation(const std::string& reason) {
  throw Error(ErrorCode::kPlugin, reason);
}

std::string tail(const std::string& text, std::size_t n) {
  return text.size() <= n ? text : text.substr(text.size() - n);
}

std::string format_seconds(double s) {
  return format_number(std::round(s * 1000.0) / 1000.0) + "s";
}

}  // namespace

nlohmann::json build_top_matches_request(const MatchContext& ctx, std::size_t k) {
  auto sources = nlohmann::json::array();
  for (const auto& f : ctx.sources()) sources.push_back(describe(f));
  auto targets = nlohmann::json::array();
  for (const auto& f : ctx.targets()) targets.push_back(describe(f));
  return {{"op", "top_matches"}, {"k", k}, {"source", sources}, {"target", targets}};
}

MatcherRanking parse_top_matches_response(std::string_view output,
                                          const MatchContext& ctx,
                                          const std::string& matcher_id,
                                          std::size_t k, bool* saw_done) {
  MatcherRanking ranking;
  ranking.matcher_id = matcher_id;
  ranking.top_k = k;
  if (saw_done) *saw_done = false;

  std::size_t line_no = 0;
  bool done = false;
  std::size_t pos = 0;
  while (pos < output.size()) {
    auto end = output.find('\n', pos);
    if (end == std::string_view::npos) end = output.size();
    std::string_view line = output.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const std::string where = " (line " + std::to_string(line_no) + ")";
    if (done) violation("output after done" + where);

    const auto msg = nlohmann::json::parse(line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object()) {
      violation("malformed response line" + where);
    }
    if (msg.contains("op")) {
      if (msg["op"] != "done") violation("unexpected op" + where);
      done = true;
      continue;
    }
    if (!msg.contains("source") || !msg["source"].is_string() ||
        !msg.contains("matches") || !msg["matches"].is_array()) {
      violation("malformed response line" + where);
    }
    const auto source = msg["source"].get<std::string>();
    if (!ctx.find_source(source)) {
      violation("unknown source attribute '" + source + "'" + where);
    }
    if (ranking.per_source.count(source)) {
      violation("duplicate source '" + source + "'" + where);
    }
    const auto& matches = msg["matches"];
    if (matches.size() > k) violation("more than k matches" + where);
    std::vector<ScoredTarget> list;
    std::set<std::string> seen;
    for (const auto& m : matches) {
      if (!m.is_object() || !m.contains("target") || !m["target"].is_string() ||
          !m.contains("score") || !m["score"].is_number()) {
        violation("malformed match entry" + where);
      }
      const auto target = m["target"].get<std::string>();
      const double score = m["score"].get<double>();
      if (!ctx.find_target(target)) {
        violation("unknown target attribute '" + target + "'" + where);
      }
      if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
        violation("score out of range" + where);
      }
      if (!seen.insert(target).second) {
        violation("duplicate target '" + target + "'" + where);
      }
      list.push_back({target, score});
    }
    sort_ranked(list);
    ranking.per_source.emplace(source, std::move(list));
  }
  if (saw_done) *saw_done = done;
  return ranking;
}

PluginRun run_external_matcher(MatcherSpec spec, const MatchContext& ctx,
                               std::chrono::duration<double> timeout) {
  PluginRun run;
  auto fail = [&](std::string reason) {
    spec.status = MatcherStatus::kFailed;
    spec.failure_reason = std::move(reason);
    run.spec = std::move(spec);
    return run;
  };
  if (spec.command.empty()) return fail("no command configured");

  const std::string request = build_top_matches_request(ctx, spec.top_k).dump() + "\n";
  const ProcessOutcome proc = run_process(spec.command, request, timeout);
  run.stderr_tail = tail(proc.err, 2000);
  if (!proc.spawned) return fail("spawn failed: " + proc.spawn_error);
  if (proc.timed_out) return fail("timeout after " + format_seconds(timeout.count()));

  bool done = false;
  MatcherRanking ranking;
  try {
    ranking = parse_top_matches_response(proc.out, ctx, spec.id, spec.top_k, &done);
  } catch (const Error& e) {
    return fail(e.what());
  }
  if (!done) {
    if (proc.exited && proc.exit_code != 0) {
      return fail("exited with code " + std::to_string(proc.exit_code) + " before done");
    }
    if (!proc.exited) {
      return fail("killed by signal " + std::to_string(proc.term_signal) + " before done");
    }
    return fail("missing done line");
  }
  if (!proc.exited || proc.exit_code != 0) {
    return fail(proc.exited ? "nonzero exit code " + std::to_string(proc.exit_code)
                            : "killed by signal " + std::to_string(proc.term_signal));
  }
  spec.status = MatcherStatus::kReady;
  spec.failure_reason.reset();
  run.spec = std::move(spec);
  run.ranking = std::move(ranking);
  return run;
}

RunnerTable RunnerTable::defaults() {
  RunnerTable t;
  t.set("python", {"python3", "{file}"});
  t.set("sh", {"/bin/sh", "{file}"});
  return t;
}

RunnerTable RunnerTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "runner table must be an object");
  RunnerTable t;
  for (const auto& [id, argv] : j.items()) {
    if (!argv.is_array() || argv.empty()) {
      throw Error(ErrorCode::kValidation, "runner '" + id + "' needs a non-empty argv");
    }
    t.set(id, argv.get<std::vector<std::string>>());
  }
  return t;
}

void RunnerTable::set(std::string id, std::vector<std::string> argv_template) {
  runners_[std::move(id)] = std::move(argv_template);
}

void RunnerTable::merge(const RunnerTable& other) {
  for (const auto& [id, argv] : other.runners_) runners_[id] = argv;
}

bool RunnerTable::contains(std::string_view id) const {
  return runners_.find(id) != runners_.end();
}

std::vector<std::string> RunnerTable::command_for(std::string_view id,
                                                  const std::filesystem::path& file) const {
  auto it = runners_.find(id);
  if (it == runners_.end()) {
    throw Error(ErrorCode::kValidation, "unknown runner '" + std::string(id) + "'");
  }
  std::vector<std::string> argv;
  bool placed = false;
  for (const auto& part : it->second) {
    auto at = part.find("{file}");
    if (at == std::string::npos) {
      argv.push_back(part);
    } else {
      argv.push_back(part.substr(0, at) + file.string() + part.substr(at + 6));
      placed = true;
    }
  }
  if (!placed) argv.push_back(file.string());
  return argv;
}

std::vector<std::string> RunnerTable::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : runners_) out.push_back(id);
  return out;
}

}  // namespace matchbench
