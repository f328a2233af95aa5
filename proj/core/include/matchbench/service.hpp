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

#ifndef MATCHBENCH_SERVICE_HPP_
#define MATCHBENCH_SERVICE_HPP_

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/engine.hpp"
#include "matchbench/error.hpp"
#include "matchbench/explainer.hpp"
#include "matchbench/pipeline.hpp"
#include "matchbench/plugin.hpp"
#include "matchbench/session.hpp"

namespace matchbench {

struct ServiceConfig {
  std::filesystem::path data_dir;  // empty keeps sessions in memory
  std::size_t workers = 2;
  EngineConfig engine;
  std::vector<std::string> default_matchers{kBuiltinMatchers.begin(), kBuiltinMatchers.end()};
  RunnerTable runners = RunnerTable::defaults();
  LlmConfig llm;
  Session::Clock clock = utc_timestamp_now;
};

struct TaskRequest {
  std::string source_csv;
  std::string target_csv;
  bool target_is_schema = false;
  std::string source_name = "source.csv";
  std::string target_name = "target.csv";
  // Builtin ids (strings) or {"id", "command"} objects for external matchers.
  // Empty means the service defaults.
  nlohmann::json matchers = nlohmann::json::array();
  nlohmann::json config = nlohmann::json::object();  // EngineConfig overrides
};

struct CandidateQuery {
  std::optional<double> cutoff;
  std::optional<std::string> group;         // target-side ontology group
  std::optional<std::string> source_group;  // source-side ontology group
  std::optional<std::string> source;
  std::optional<std::string> status;
  std::size_t offset = 0;
  std::optional<std::size_t> limit;
};

// Registration body for POST matchers: exactly one of `command` or
// (`code`, `runner`); neither registers a builtin by id.
struct MatcherRegistration {
  std::string id;
  std::vector<std::string> command;
  std::optional<std::string> code;
  std::optional<std::string> runner;
  std::optional<std::size_t> top_k;
};

// Owns all sessions and the matching worker pool. Each session has a single
// writer at a time; reads share the lock.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const ServiceConfig& config() const { return config_; }

  nlohmann::json create_session();
  std::vector<std::string> session_ids() const;

  // Parses both uploads synchronously (ParseError surfaces with its line) and
  // queues the matching job.
  JobStatus create_task(const std::string& id, TaskRequest request);
  JobStatus status(const std::string& id) const;
  JobStatus wait_for_job(const std::string& id,
                         std::chrono::milliseconds timeout = std::chrono::minutes(5)) const;

  nlohmann::json candidates(const std::string& id, const CandidateQuery& query) const;
  nlohmann::json decide(const std::string& id, const DecisionRequest& request);
  nlohmann::json set_threshold(const std::string& id, double cutoff, const std::string& actor);
  nlohmann::json profile(const std::string& id, Side side, const std::string& attribute) const;
  nlohmann::json value_map(const std::string& id, const Pair& pair,
                           double threshold = kDefaultValueThreshold) const;
  nlohmann::json put_value_map(const std::string& id, const Pair& pair,
                               const nlohmann::json& body, const std::string& actor);
  nlohmann::json add_matcher(const std::string& id, const MatcherRegistration& registration,
                             const std::string& actor);
  void remove_matcher(const std::string& id, const std::string& matcher_id,
                      const std::string& actor);
  nlohmann::json rerun(const std::string& id, const std::string& actor);
  nlohmann::json metrics(const std::string& id, std::optional<std::size_t> k) const;
  nlohmann::json consensus(const std::string& id, std::optional<std::size_t> k) const;
  nlohmann::json breakdown(const std::string& id) const;
  nlohmann::json provenance(const std::string& id, std::uint64_t after_seq = 0) const;
  nlohmann::json explain(const std::string& id, const Pair& pair, bool narrative) const;
  std::string export_artifact(const std::string& id, ExportKind kind) const;
  nlohmann::json import_artifact(const std::string& id, ImportKind kind,
                                 const std::string& content, const std::string& actor);

  // Calls `fn` with the session under a shared lock.
  void read_session(const std::string& id, const std::function<void(const Session&)>& fn) const;

  // Stops accepting jobs and waits for queued and running ones to finish.
  void shutdown();

 private:
  struct Entry {
    mutable std::shared_mutex mutex;
    std::unique_ptr<Session> session;
    mutable std::mutex job_mutex;
    mutable std::condition_variable job_cv;
    JobStatus job;
  };

  std::shared_ptr<Entry> entry(const std::string& id) const;
  std::filesystem::path session_dir(const std::string& id) const;
  void enqueue(std::function<void()> job);
  void worker_loop();
  void run_job(const std::shared_ptr<Entry>& e);
  void load_existing();

  ServiceConfig config_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_job_ = 1;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<std::function<void()>> queue_;
  std::size_t active_jobs_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

// HTTP status for an error code: 400 parse/validation, 404 not found,
// 409 conflict/not ready, 502 plugin, 500 otherwise.
int http_status_for(ErrorCode code);

}  // namespace matchbench

#endif  // MATCHBENCH_SERVICE_HPP_
