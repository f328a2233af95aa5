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

#include "matchbench/service.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <regex>
#include <set>

#include "matchbench/error.hpp"
#include "matchbench/text.hpp"

namespace matchbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string random_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id(12, '0');
  for (auto& ch : id) ch = kHex[rng() % 16];
  return id;
}

bool finished(JobPhase p) { return p == JobPhase::kDone || p == JobPhase::kFailed; }

void validate_matcher_id(const std::string& id) {
  static const std::regex kPattern("[A-Za-z0-9_.-]{1,64}");
  if (!std::regex_match(id, kPattern)) {
    throw Error(ErrorCode::kValidation,
                "matcher id must be 1-64 characters of letters, digits, '_', '.', '-'");
  }
}

std::string extension_for(const std::string& runner) {
  if (runner == "python") return ".py";
  if (runner == "sh") return ".sh";
  return ".src";
}

std::vector<MatcherSpec> matcher_specs(const json& items,
                                       const std::vector<std::string>& defaults,
                                       std::size_t top_k) {
  std::vector<MatcherSpec> specs;
  if (items.is_null() || items.empty()) {
    for (const auto& id : defaults) specs.push_back(MatcherSpec::builtin(id, top_k));
    return specs;
  }
  if (!items.is_array()) throw Error(ErrorCode::kValidation, "matchers must be a list");
  std::set<std::string> seen;
  for (const auto& item : items) {
    MatcherSpec spec;
    if (item.is_string()) {
      const auto id = item.get<std::string>();
      if (!is_builtin_matcher(id)) {
        throw Error(ErrorCode::kValidation, "unknown builtin matcher '" + id + "'");
      }
      spec = MatcherSpec::builtin(id, top_k);
    } else if (item.is_object() && item.contains("id")) {
      const auto id = item["id"].get<std::string>();
      validate_matcher_id(id);
      const std::size_t k = item.value("top_k", top_k);
      if (item.contains("command")) {
        std::vector<std::string> argv = item["command"].is_string()
                                            ? split_command_line(item["command"].get<std::string>())
                                            : item["command"].get<std::vector<std::string>>();
        if (argv.empty()) throw Error(ErrorCode::kValidation, "empty command for " + id);
        spec = MatcherSpec::external(id, std::move(argv), k);
      } else if (is_builtin_matcher(id)) {
        spec = MatcherSpec::builtin(id, k);
      } else {
        throw Error(ErrorCode::kValidation, "matcher '" + id + "' needs a command");
      }
    } else {
      throw Error(ErrorCode::kValidation, "matcher entries are ids or {id, command} objects");
    }
    if (!seen.insert(spec.id).second) {
      throw Error(ErrorCode::kValidation, "duplicate matcher id '" + spec.id + "'");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kValidation: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kNotReady: return 409;
    case ErrorCode::kPlugin: return 502;
    case ErrorCode::kEngine:
    case ErrorCode::kIo: return 500;
  }
  return 500;
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  config_.engine.validate();
  if (!config_.data_dir.empty()) {
    fs::create_directories(config_.data_dir);
    load_existing();
  }
  const std::size_t n = std::max<std::size_t>(1, config_.workers);
  for (std::size_t i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Service::~Service() { shutdown(); }

void Service::load_existing() {
  for (const auto& dirent : fs::directory_iterator(config_.data_dir)) {
    if (!dirent.is_directory() || !fs::exists(dirent.path() / "session.json")) continue;
    try {
      auto e = std::make_shared<Entry>();
      e->session = Session::load(dirent.path(), config_.clock);
      e->job.job_id = "restored";
      if (e->session->ready()) {
        e->job.phase = JobPhase::kDone;
        for (const auto& m : e->session->state().matchers) e->job.progress[m.id] = 1.0;
      } else {
        e->job.phase = JobPhase::kPending;
      }
      sessions_[e->session->id()] = std::move(e);
    } catch (const std::exception& ex) {
      std::cerr << "skipping session " << dirent.path() << ": " << ex.what() << "\n";
    }
  }
}

fs::path Service::session_dir(const std::string& id) const {
  return config_.data_dir.empty() ? fs::path() : config_.data_dir / id;
}

std::shared_ptr<Service::Entry> Service::entry(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'");
  return it->second;
}

json Service::create_session() {
  auto e = std::make_shared<Entry>();
  std::string id;
  {
    std::lock_guard lock(sessions_mutex_);
    do {
      id = random_id();
    } while (sessions_.count(id));
    e->session = std::make_unique<Session>(id, session_dir(id), config_.clock);
    sessions_[id] = e;
  }
  e->session->save();
  return {{"id", id}, {"created", e->session->created()}};
}

std::vector<std::string> Service::session_ids() const {
  std::lock_guard lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

JobStatus Service::create_task(const std::string& id, TaskRequest request) {
  auto e = entry(id);
  json cfg_json = config_.engine;
  if (!request.config.is_null()) {
    if (!request.config.is_object()) throw Error(ErrorCode::kValidation, "config must be an object");
    cfg_json.update(request.config);
  }
  EngineConfig cfg;
  try {
    cfg = cfg_json.get<EngineConfig>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kValidation, std::string("config: ") + ex.what());
  }
  cfg.validate();
  auto specs = matcher_specs(request.matchers, config_.default_matchers, cfg.top_k);
  auto task = TaskData::build(std::move(request.source_csv), std::move(request.target_csv),
                              request.target_is_schema, std::move(request.source_name),
                              std::move(request.target_name));
  JobStatus status;
  {
    std::unique_lock job_lock(e->job_mutex);
    if (!e->job.job_id.empty() && !finished(e->job.phase) && e->session->has_task()) {
      throw Error(ErrorCode::kConflict, "a matching job is already running for this session");
    }
    std::unique_lock lock(e->mutex);
    e->session->begin_task(task, cfg, specs);
    {
      std::lock_guard sl(sessions_mutex_);
      e->job = JobStatus{};
      e->job.job_id = "job-" + std::to_string(next_job_++);
    }
    for (const auto& s : specs) e->job.progress[s.id] = 0.0;
    status = e->job;
  }
  enqueue([this, e] { run_job(e); });
  return status;
}

void Service::run_job(const std::shared_ptr<Entry>& e) {
  PipelineHooks hooks;
  hooks.exclusive = [&](const std::function<void()>& fn) {
    std::unique_lock lock(e->mutex);
    fn();
  };
  hooks.on_phase = [&](JobPhase p) {
    std::lock_guard lock(e->job_mutex);
    if (static_cast<int>(p) > static_cast<int>(e->job.phase)) e->job.phase = p;
    e->job_cv.notify_all();
  };
  hooks.on_progress = [&](const std::string& matcher, double f) {
    std::lock_guard lock(e->job_mutex);
    double& slot = e->job.progress[matcher];
    slot = std::max(slot, std::clamp(f, 0.0, 1.0));
  };
  try {
    run_task_pipeline(*e->session, hooks);
  } catch (const std::exception& ex) {
    {
      std::unique_lock lock(e->mutex);
      if (!e->session->task_error()) e->session->fail_task(ex.what());
    }
    std::lock_guard lock(e->job_mutex);
    e->job.phase = JobPhase::kFailed;
    e->job.error = ex.what();
    e->job_cv.notify_all();
  }
}

JobStatus Service::status(const std::string& id) const {
  auto e = entry(id);
  std::lock_guard lock(e->job_mutex);
  if (e->job.job_id.empty()) throw Error(ErrorCode::kNotFound, "session has no task");
  return e->job;
}

JobStatus Service::wait_for_job(const std::string& id, std::chrono::milliseconds timeout) const {
  auto e = entry(id);
  std::unique_lock lock(e->job_mutex);
  if (e->job.job_id.empty()) throw Error(ErrorCode::kNotFound, "session has no task");
  e->job_cv.wait_for(lock, timeout, [&] { return finished(e->job.phase); });
  return e->job;
}

void Service::enqueue(std::function<void()> job) {
  {
    std::lock_guard lock(queue_mutex_);
    if (stopping_) throw Error(ErrorCode::kNotReady, "service is shutting down");
    queue_.push_back(std::move(job));
  }
  queue_cv_.notify_one();
}

void Service::worker_loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      ++active_jobs_;
    }
    job();
    std::lock_guard lock(queue_mutex_);
    --active_jobs_;
  }
}

void Service::shutdown() {
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
}

void Service::read_session(const std::string& id,
                           const std::function<void(const Session&)>& fn) const {
  auto e = entry(id);
  std::shared_lock lock(e->mutex);
  fn(*e->session);
}

json Service::candidates(const std::string& id, const CandidateQuery& q) const {
  auto e = entry(id);
  std::shared_lock lock(e->mutex);
  const Session& s = *e->session;
  const TaskData& task = s.task();
  const double cutoff = q.cutoff.value_or(s.state().config.display_cutoff);
  if (!std::isfinite(cutoff)) throw Error(ErrorCode::kValidation, "cutoff must be finite");
  if (q.group && !task.target_ontology.has_group(*q.group)) {
    throw Error(ErrorCode::kValidation, "unknown group '" + *q.group + "'");
  }
  if (q.source_group && !task.source_ontology.has_group(*q.source_group)) {
    throw Error(ErrorCode::kValidation, "unknown source group '" + *q.source_group + "'");
  }
  if (q.source && !task.source.find(*q.source)) {
    throw Error(ErrorCode::kNotFound, "unknown source attribute '" + *q.source + "'");
  }
  std::optional<CandidateStatus> status;
  if (q.status) status = candidate_status_from_string(*q.status);

  json page = json::array();
  std::size_t total = 0;
  const std::size_t limit = q.limit.value_or(std::numeric_limits<std::size_t>::max());
  for (const Candidate* c : s.state().candidates.ranked()) {
    if (c->aggregate < cutoff) continue;
    if (q.source && c->source != *q.source) continue;
    if (status && c->status != *status) continue;
    const std::string tgroup = task.target_ontology.group_of(c->target);
    if (q.group && tgroup != *q.group) continue;
    const std::string sgroup = task.source_ontology.group_of(c->source);
    if (q.source_group && sgroup != *q.source_group) continue;
    if (total >= q.offset && page.size() < limit) {
      json j = *c;
      j["target_group"] = tgroup;
      j["source_group"] = sgroup;
      page.push_back(std::move(j));
    }
    ++total;
  }
  json out{{"cutoff", cutoff},
           {"total", total},
           {"offset", q.offset},
           {"ready", s.ready()},
           {"candidates", std::move(page)}};
  if (q.limit) out["limit"] = *q.limit;
  return out;
}

json Service::decide(const std::string& id, const DecisionRequest& request) {
  auto e = entry(id);
  std::unique_lock lock(e->mutex);
  const auto outcome = e->session->apply_decision(request);
  json out{{"applied", outcome.applied}, {"candidate", outcome.candidate}};
  out["seq"] = outcome.applied ? outcome.seq : e->session->last_seq();
  return out;
}

json Service::set_threshold(const std::string& id, double cutoff, const std::string& actor) {
  auto e = entry(id);
  std::unique_lock lock(e->mutex);
  const bool changed = e->session->set_display_cutoff(cutoff, actor);
  return {{"display_cutoff", e->session->state().config.display_cutoff}, {"changed", changed}};
}

json Service::profile(const std::string& id, Side side, const std::string& attribute) const {
  auto e = entry(id);
  std::shared_lock lock(e->mutex);
  json j = e->session->profile(side, attribute);
  j["side"] = to_string(side);
  return j;
}

json Service::value_map(const std::string& id, const Pair& pair, double threshold) const {
  auto e = entry(id);
  std::shared_lock lock(e->mutex);
  return e->session->value_map_view(pair, threshold);
}

json Service::put_value_map(const std::string& id, const Pair& pair, const json& body,
                            const std::string& actor) {
  if (!body.is_object() || !body.contains("pairs") || !body["pairs"].is_array()) {
    throw Error(ErrorCode::kValidation, "body needs a pairs list");
  }
  ValueMapping m;
  try {
    m = body.get<ValueMapping>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kValidation, std::string("value map: ") + ex.what());
  }
  m.source_attr = pair.source;
  m.target_attr = pair.target;
  auto e = entry(id);
  std::unique_lock lock(e->mutex);
  const bool changed = e->session->edit_value_map(std::move(m), actor);
  json view = e->session->value_map_view(pair, kDefaultValueThreshold);
  view["changed"] = changed;
  return view;
}

json Service::add_matcher(const std::string& id, const MatcherRegistration& reg,
                          const std::string& actor) {
  validate_matcher_id(reg.id);
  auto e = entry(id);
  std::shared_ptr<const TaskData> task;
  EngineConfig cfg;
  {
    std::shared_lock lock(e->mutex);
    if (!e->session->ready()) throw Error(ErrorCode::kNotReady, "matching job has not finished");
    if (e->session->state().matcher(reg.id)) {
      throw Error(ErrorCode::kConflict, "matcher '" + reg.id + "' already registered");
    }
    task = e->session->task_ptr();
    cfg = e->session->state().config;
  }
  const std::size_t top_k = reg.top_k.value_or(cfg.top_k);
  MatcherSpec spec;
  if (reg.code) {
    if (!reg.runner) throw Error(ErrorCode::kValidation, "code needs a runner");
    if (!config_.runners.contains(*reg.runner)) {
      throw Error(ErrorCode::kValidation, "unknown runner '" + *reg.runner + "'");
    }
    fs::path dir = session_dir(id);
    if (dir.empty()) dir = fs::temp_directory_path() / "matchbench" / id;
    const fs::path file = dir / "plugins" / (reg.id + extension_for(*reg.runner));
    fs::create_directories(file.parent_path());
    {
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      out << *reg.code;
      if (!out) throw Error(ErrorCode::kIo, "cannot write plugin code");
    }
    spec = MatcherSpec::external(reg.id, config_.runners.command_for(*reg.runner, file), top_k);
  } else if (!reg.command.empty()) {
    spec = MatcherSpec::external(reg.id, reg.command, top_k);
  } else if (is_builtin_matcher(reg.id)) {
    spec = MatcherSpec::builtin(reg.id, top_k);
  } else {
    throw Error(ErrorCode::kValidation, "matcher needs a command, code and runner, or a builtin id");
  }

  PluginRun run;
  if (spec.kind == MatcherKind::kBuiltin) {
    run.spec = spec;
    run.ranking = run_builtin_matcher(*task->context, spec.id, spec.top_k);
    run.spec.status = MatcherStatus::kReady;
  } else {
    run = run_external_matcher(spec, *task->context, cfg.plugin_timeout);
  }
  std::unique_lock lock(e->mutex);
  if (e->session->task_ptr() != task) {
    throw Error(ErrorCode::kConflict, "task was replaced while the matcher ran");
  }
  e->session->add_matcher(run, actor);
  json out{{"matcher", run.spec}};
  if (!run.stderr_tail.empty()) out["stderr_tail"] = run.stderr_tail;
  return out;
}

void Service::remove_matcher(const std::string& id, const std::string& matcher_id,
                             const std::string& actor) {
  auto e = entry(id);
  std::unique_lock lock(e->mutex);
  e->session->remove_matcher(matcher_id, actor);
}

json Service::rerun(const std::string& id, const std::string& actor) {
  auto e = entry(id);
  std::unique_lock lock(e->mutex);
  e->session->rerun_builtins(actor);
  return {{"seq", e->session->last_seq()}, {"matchers", e->session->state().matchers}};
}

json Service::metrics(const std::string& id, std::optional<std::size_t> k) const {
  auto e = entry(id);
  std::shared_lock lock(e->mutex);
  return e->session->metrics(k.value_or(e->session->state().config.top_k));
}

json Service::consensus(const std::string& id, std::optional<std::size_t> k) const {
  auto e = entry(id);
  std::shared_lock lock(e->mutex);
  return e->session->consensus(k.value_or(e->session->state().config.top_k));
}

json Service::breakdown(const std::string& id) const {
  auto e = entry(id);
  std::shared_lock lock(e->mutex);
  return e->session->breakdown();
}

json Service::provenance(const std::string& id, std::uint64_t after_seq) const {
  auto e = entry(id);
  std::shared_lock lock(e->mutex);
  json events = json::array();
  for (const auto& ev : e->session->events()) {
    if (ev.seq > after_seq) events.push_back(ev);
  }
  return {{"events", std::move(events)}, {"last_seq", e->session->last_seq()}};
}

json Service::explain(const std::string& id, const Pair& pair, bool narrative) const {
  Explanation ex;
  {
    auto e = entry(id);
    std::shared_lock lock(e->mutex);
    ex = e->session->explain(pair);
  }
  if (narrative) {
    if (config_.llm.enabled()) {
      attach_narrative(ex, config_.llm);
    } else {
      ex.warnings.push_back("no language model endpoint configured");
    }
  }
  return ex;
}

std::string Service::export_artifact(const std::string& id, ExportKind kind) const {
  auto e = entry(id);
  std::shared_lock lock(e->mutex);
  return e->session->export_artifact(kind);
}

json Service::import_artifact(const std::string& id, ImportKind kind, const std::string& content,
                              const std::string& actor) {
  auto e = entry(id);
  std::unique_lock lock(e->mutex);
  json out = e->session->import_artifact(kind, content, actor);
  out["seq"] = e->session->last_seq();
  return out;
}

}  // namespace matchbench
