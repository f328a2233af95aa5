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

#ifndef MATCHBENCH_SESSION_HPP_
#define MATCHBENCH_SESSION_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/engine.hpp"
#include "matchbench/eval.hpp"
#include "matchbench/explainer.hpp"
#include "matchbench/ingest.hpp"
#include "matchbench/matchers.hpp"
#include "matchbench/plugin.hpp"
#include "matchbench/value_map.hpp"

namespace matchbench {

enum class EventOp {
  kAccept,
  kReject,
  kFlag,
  kNote,
  kEditValueMap,
  kSetThreshold,
  kAddMatcher,
  kRemoveMatcher,
  kRerun,
  kImport,
  kExport,
};

std::string_view to_string(EventOp op);
EventOp event_op_from_string(std::string_view text);

struct ProvenanceEvent {
  std::uint64_t seq = 0;
  std::string timestamp;
  std::string actor;
  EventOp op = EventOp::kAccept;
  nlohmann::json payload = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const ProvenanceEvent& e);
void from_json(const nlohmann::json& j, ProvenanceEvent& e);

enum class DecisionAction { kAccept, kReject, kFlag, kNote };
DecisionAction decision_action_from_string(std::string_view text);

struct DecisionRequest {
  Pair pair;
  DecisionAction action = DecisionAction::kAccept;
  std::optional<std::string> note;
  std::string actor = "curator";
};

struct DecisionOutcome {
  bool applied = false;  // false for idempotent repeats
  std::uint64_t seq = 0;
  Candidate candidate;
};

enum class ExportKind { kHarmonizedCsv, kMappingSpec, kGroundTruthCsv, kProvenance };
enum class ImportKind { kMappingSpec, kGroundTruthCsv, kHistoryCsv, kSynonymsCsv };
ExportKind export_kind_from_string(std::string_view text);
ImportKind import_kind_from_string(std::string_view text);
std::string_view to_string(ExportKind kind);
std::string_view to_string(ImportKind kind);

struct ImportReport {
  std::size_t applied = 0;
  std::size_t unchanged = 0;
  std::vector<std::string> skipped;    // entries naming unknown attributes
  std::vector<std::string> conflicts;  // one-to-one violations

  bool partial_failure() const { return !skipped.empty() || !conflicts.empty(); }
};

void to_json(nlohmann::json& j, const ImportReport& r);

// Who decided an accepted/rejected pair and when; exported with ground truth.
struct DecisionMeta {
  std::string actor;
  std::string timestamp;

  bool operator==(const DecisionMeta&) const = default;
};

inline constexpr std::string_view kAutoActor = "auto";
inline constexpr std::string_view kImportActor = "import";

// Immutable inputs of a task: parsed datasets, their ontologies and the
// feature context every matcher reads.
struct TaskData {
  std::string source_name = "source.csv";
  std::string target_name = "target.csv";
  std::string source_csv;
  std::string target_csv;
  bool target_is_schema = false;
  Dataset source;
  Dataset target;
  Ontology source_ontology;
  Ontology target_ontology;
  std::shared_ptr<const MatchContext> context;

  // Parses and annotates both sides. Throws ParseError / Validation.
  static std::shared_ptr<const TaskData> build(std::string source_csv, std::string target_csv,
                                               bool target_is_schema,
                                               std::string source_name = "source.csv",
                                               std::string target_name = "target.csv");
  const Dataset& dataset(Side side) const { return side == Side::kSource ? source : target; }
};

// Everything that events mutate. Ground truth is derived from candidate
// statuses, so the two can never disagree.
struct SessionState {
  EngineConfig config;
  std::vector<MatcherSpec> matchers;
  WeightVector weights;
  CandidateTable candidates;
  std::map<Pair, ValueMapping> value_maps;
  std::map<Pair, DecisionMeta> decisions;
  std::set<Pair> history;
  std::string synonyms_csv;
  SynonymTable synonyms;

  GroundTruth ground_truth(std::uint64_t seq) const;
  RankedLists ranked_lists() const;
  const MatcherSpec* matcher(std::string_view id) const;
};

nlohmann::json state_to_json(const SessionState& state);
SessionState state_from_json(const nlohmann::json& j);

// Applies one event to `state`. Pure given (task, state, event): this is both
// the live mutation path and the replay fold.
void apply_event(const TaskData& task, SessionState& state, const ProvenanceEvent& event);

SessionState replay(const TaskData& task, const SessionState& initial,
                    const std::vector<ProvenanceEvent>& events);

std::string utc_timestamp_now();

// One curation session. Not thread-safe; callers serialize writers.
class Session {
 public:
  using Clock = std::function<std::string()>;

  // `dir` empty keeps the session in memory only.
  Session(std::string id, std::filesystem::path dir = {}, Clock clock = utc_timestamp_now);

  const std::string& id() const { return id_; }
  const std::string& created() const { return created_; }
  const std::filesystem::path& dir() const { return dir_; }
  bool has_task() const { return task_ != nullptr; }
  bool ready() const { return ready_; }
  const TaskData& task() const;
  std::shared_ptr<const TaskData> task_ptr() const { return task_; }
  const SessionState& state() const { return state_; }
  const SessionState& initial_state() const { return initial_; }
  const std::vector<ProvenanceEvent>& events() const { return events_; }
  std::uint64_t last_seq() const { return events_.empty() ? 0 : events_.back().seq; }

  // --- task lifecycle (used by the matching job) ---
  // Installs a freshly built task and resets all state and provenance.
  void begin_task(std::shared_ptr<const TaskData> task, EngineConfig config,
                  std::vector<MatcherSpec> matchers);
  // Marks easy matches auto-accepted; returns them.
  std::vector<Pair> apply_easy_matches();
  // Merges one matcher's outcome (ready or failed) into the candidates.
  void merge_matcher_result(const PluginRun& run);
  // Snapshots the initial artifacts; decisions are accepted afterwards.
  void finish_task();
  void fail_task(const std::string& reason);
  const std::optional<std::string>& task_error() const { return task_error_; }

  // --- curation ---
  DecisionOutcome apply_decision(const DecisionRequest& request);
  bool set_display_cutoff(double cutoff, const std::string& actor);
  // Returns false when the stored mapping already equals `mapping`.
  bool edit_value_map(ValueMapping mapping, const std::string& actor);
  // Stored mapping for the pair, else a fresh proposal.
  nlohmann::json value_map_view(const Pair& pair, double threshold) const;

  // Records an externally executed matcher run (ready or failed).
  void add_matcher(const PluginRun& run, const std::string& actor);
  void remove_matcher(std::string_view id, const std::string& actor);
  void rerun_builtins(const std::string& actor);

  // --- reads ---
  GroundTruth ground_truth() const { return state_.ground_truth(last_seq()); }
  MetricsReport metrics(std::size_t k) const;
  ConsensusReport consensus(std::size_t k) const;
  RankBreakdown breakdown() const;
  Profile profile(Side side, std::string_view attribute) const;
  Explanation explain(const Pair& pair) const;

  // --- artifacts ---
  std::string export_artifact(ExportKind kind) const;
  // Appends an export event (used when an export is written to disk).
  void record_export(ExportKind kind, const std::string& actor);
  ImportReport import_artifact(ImportKind kind, std::string_view content,
                               const std::string& actor = std::string(kImportActor));

  // Writes session.json, inputs, initial and current artifacts, and the log.
  void save() const;
  // Rebuilds a session from its directory by replaying the event log over
  // the initial artifacts.
  static std::unique_ptr<Session> load(const std::filesystem::path& dir,
                                       Clock clock = utc_timestamp_now);

 private:
  const ProvenanceEvent& append(EventOp op, const std::string& actor, nlohmann::json payload);
  void require_ready() const;
  void persist_event(const ProvenanceEvent& event) const;
  void persist_current() const;
  void write_session_json() const;

  ImportReport import_decisions(
      const std::vector<std::tuple<Pair, DecisionAction, std::optional<std::string>,
                                   std::optional<DecisionMeta>>>& entries,
      const std::string& actor, ImportReport report);

  std::string id_;
  std::filesystem::path dir_;
  Clock clock_;
  std::string created_;
  std::shared_ptr<const TaskData> task_;
  bool ready_ = false;
  std::optional<std::string> task_error_;
  SessionState initial_;
  SessionState state_;
  std::vector<ProvenanceEvent> events_;
};

}  // namespace matchbench

#endif  // MATCHBENCH_SESSION_HPP_
