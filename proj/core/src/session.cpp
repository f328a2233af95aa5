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

#include "matchbench/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <utility>

#include "matchbench/csv.hpp"
#include "matchbench/error.hpp"
#include "matchbench/text.hpp"

namespace matchbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<EventOp, std::string_view> kOpNames[] = {
    {EventOp::kAccept, "accept"},
    {EventOp::kReject, "reject"},
    {EventOp::kFlag, "flag"},
    {EventOp::kNote, "note"},
    {EventOp::kEditValueMap, "edit_value_map"},
    {EventOp::kSetThreshold, "set_threshold"},
    {EventOp::kAddMatcher, "add_matcher"},
    {EventOp::kRemoveMatcher, "remove_matcher"},
    {EventOp::kRerun, "rerun"},
    {EventOp::kImport, "import"},
    {EventOp::kExport, "export"},
};

constexpr std::pair<ExportKind, std::string_view> kExportNames[] = {
    {ExportKind::kHarmonizedCsv, "harmonized_csv"},
    {ExportKind::kMappingSpec, "mapping_spec"},
    {ExportKind::kGroundTruthCsv, "ground_truth_csv"},
    {ExportKind::kProvenance, "provenance"},
};

constexpr std::pair<ImportKind, std::string_view> kImportNames[] = {
    {ImportKind::kMappingSpec, "mapping_spec"},
    {ImportKind::kGroundTruthCsv, "ground_truth_csv"},
    {ImportKind::kHistoryCsv, "history_csv"},
    {ImportKind::kSynonymsCsv, "synonyms_csv"},
};

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "unknown";
}

template <typename E, std::size_t N>
E value_of(const std::pair<E, std::string_view> (&table)[N], std::string_view text,
           std::string_view what) {
  for (const auto& [e, name] : table) {
    if (name == text) return e;
  }
  throw Error(ErrorCode::kValidation, "unknown " + std::string(what) + " '" +
                                          std::string(text) + "'");
}

bool is_accepted(CandidateStatus s) {
  return s == CandidateStatus::kAccepted || s == CandidateStatus::kAutoAccepted;
}

json pair_json(const Pair& p) { return {{"source", p.source}, {"target", p.target}}; }

Pair pair_from(const json& j) {
  return {j.at("source").get<std::string>(), j.at("target").get<std::string>()};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Rows of a ground-truth style CSV: source,target[,label[,actor,timestamp]].
struct LabeledRow {
  std::size_t line = 0;
  Pair pair;
  std::optional<bool> accept;  // nullopt when the label is unrecognized
  std::optional<DecisionMeta> meta;
};

std::optional<bool> parse_label(std::string_view raw) {
  const std::string label = to_lower(trim(raw));
  if (label == "accept" || label == "accepted" || label == "1" || label == "true" ||
      label == "yes") {
    return true;
  }
  if (label == "reject" || label == "rejected" || label == "0" || label == "false" ||
      label == "no") {
    return false;
  }
  return std::nullopt;
}

std::vector<LabeledRow> parse_labeled_csv(std::string_view content, bool label_required) {
  const auto rows = parse_csv(content);
  std::vector<LabeledRow> out;
  if (rows.empty()) return out;
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (to_lower(trim(header[i])) == name) return i;
    }
    return std::nullopt;
  };
  const auto src = column("source"), tgt = column("target"), label = column("label");
  const auto actor = column("actor"), ts = column("timestamp");
  if (!src || !tgt) throw ParseError(1, "header needs source and target columns");
  if (label_required && !label) throw ParseError(1, "header needs a label column");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    LabeledRow lr;
    lr.line = r + 1;
    lr.pair = {row[*src], row[*tgt]};
    lr.accept = label ? parse_label(row[*label]) : std::optional<bool>(true);
    if (actor && ts) lr.meta = DecisionMeta{row[*actor], row[*ts]};
    out.push_back(std::move(lr));
  }
  return out;
}

std::set<Pair> parse_history(std::string_view content) {
  std::set<Pair> history;
  for (const auto& row : parse_labeled_csv(content, false)) {
    if (row.accept.value_or(false)) history.insert(row.pair);
  }
  return history;
}

const Candidate* accepted_partner(const SessionState& state, const Pair& pair) {
  for (const auto& [p, c] : state.candidates.all()) {
    if (p == pair || !is_accepted(c.status)) continue;
    if (p.source == pair.source || p.target == pair.target) return &c;
  }
  return nullptr;
}

bool same_mapping(const ValueMapping& a, const ValueMapping& b) {
  if (a.transform != b.transform || a.pairs.size() != b.pairs.size()) return false;
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    if (a.pairs[i].from != b.pairs[i].from || a.pairs[i].to != b.pairs[i].to) return false;
  }
  return true;
}

// Fills similarity and unmapped_source from the datasets and orders pairs by
// source value so stored mappings are canonical.
ValueMapping normalize_mapping(const TaskData& task, ValueMapping m) {
  if (!task.source.find(m.source_attr)) {
    throw Error(ErrorCode::kNotFound, "unknown source attribute '" + m.source_attr + "'");
  }
  if (!task.target.find(m.target_attr)) {
    throw Error(ErrorCode::kNotFound, "unknown target attribute '" + m.target_attr + "'");
  }
  for (auto& p : m.pairs) {
    p.from = trim(p.from);
    p.to = trim(p.to);
    p.similarity = edit_similarity(canonicalize_value(p.from), canonicalize_value(p.to));
  }
  std::sort(m.pairs.begin(), m.pairs.end(),
            [](const ValuePair& a, const ValuePair& b) { return a.from < b.from; });
  validate_value_mapping(m);
  m.unmapped_source.clear();
  for (const auto& v : unique_values(task.source, m.source_attr)) {
    const bool mapped = std::any_of(m.pairs.begin(), m.pairs.end(),
                                    [&](const ValuePair& p) { return p.from == v; });
    if (!mapped) m.unmapped_source.push_back(v);
  }
  std::sort(m.unmapped_source.begin(), m.unmapped_source.end());
  return m;
}

DecisionMeta meta_of(const ProvenanceEvent& e) {
  if (e.payload.contains("meta")) {
    const auto& m = e.payload["meta"];
    return {m.at("actor").get<std::string>(), m.at("timestamp").get<std::string>()};
  }
  return {e.actor, e.timestamp};
}

constexpr std::string_view kStateParts[] = {"config",    "matchers",  "weights",
                                            "candidates", "value_maps", "decisions",
                                            "history",   "synonyms"};

}  // namespace

std::string_view to_string(EventOp op) { return name_of(kOpNames, op); }
EventOp event_op_from_string(std::string_view text) {
  return value_of(kOpNames, text, "event op");
}
std::string_view to_string(ExportKind kind) { return name_of(kExportNames, kind); }
std::string_view to_string(ImportKind kind) { return name_of(kImportNames, kind); }
ExportKind export_kind_from_string(std::string_view text) {
  return value_of(kExportNames, text, "export kind");
}
ImportKind import_kind_from_string(std::string_view text) {
  return value_of(kImportNames, text, "import kind");
}

DecisionAction decision_action_from_string(std::string_view text) {
  if (text == "accept") return DecisionAction::kAccept;
  if (text == "reject") return DecisionAction::kReject;
  if (text == "flag") return DecisionAction::kFlag;
  if (text == "note") return DecisionAction::kNote;
  throw Error(ErrorCode::kValidation, "unknown action '" + std::string(text) + "'");
}

void to_json(json& j, const ProvenanceEvent& e) {
  j = json{{"seq", e.seq},
           {"timestamp", e.timestamp},
           {"actor", e.actor},
           {"op", to_string(e.op)},
           {"payload", e.payload}};
}

void from_json(const json& j, ProvenanceEvent& e) {
  e.seq = j.at("seq").get<std::uint64_t>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.actor = j.at("actor").get<std::string>();
  e.op = event_op_from_string(j.at("op").get<std::string>());
  e.payload = j.value("payload", json::object());
}

void to_json(json& j, const ImportReport& r) {
  j = json{{"applied", r.applied},
           {"unchanged", r.unchanged},
           {"skipped", r.skipped},
           {"conflicts", r.conflicts},
           {"partial_failure", r.partial_failure()}};
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

// --- task data ---------------------------------------------------------------

std::shared_ptr<const TaskData> TaskData::build(std::string source_csv, std::string target_csv,
                                                bool target_is_schema, std::string source_name,
                                                std::string target_name) {
  auto task = std::make_shared<TaskData>();
  task->source_name = std::move(source_name);
  task->target_name = std::move(target_name);
  task->target_is_schema = target_is_schema;
  task->source = load_csv(source_csv, Side::kSource);
  task->target = target_is_schema ? load_schema_csv(target_csv, Side::kTarget)
                                  : load_csv(target_csv, Side::kTarget);
  if (task->source.attributes.empty() || task->target.attributes.empty()) {
    throw Error(ErrorCode::kValidation, "both datasets need at least one attribute");
  }
  annotate_dataset(task->source);
  annotate_dataset(task->target);
  task->source_ontology = infer_ontology(task->source);
  task->target_ontology = infer_ontology(task->target);
  task->source_csv = std::move(source_csv);
  task->target_csv = std::move(target_csv);
  task->context = std::make_shared<MatchContext>(task->source, task->target);
  return task;
}

// --- state -------------------------------------------------------------------

GroundTruth SessionState::ground_truth(std::uint64_t seq) const {
  GroundTruth gt;
  gt.snapshot_seq = seq;
  for (const auto& [p, c] : candidates.all()) {
    if (is_accepted(c.status)) gt.accepted.insert(p);
    if (c.status == CandidateStatus::kAutoAccepted) gt.trivial.insert(p);
    if (c.status == CandidateStatus::kRejected) gt.rejected.insert(p);
  }
  return gt;
}

RankedLists SessionState::ranked_lists() const {
  RankedLists lists;
  for (const auto& [id, ranking] : candidates.rankings()) {
    auto& per_source = lists[id];
    for (const auto& [source, ranked] : ranking.per_source) {
      auto& targets = per_source[source];
      for (const auto& st : ranked) targets.push_back(st.target);
    }
  }
  return lists;
}

const MatcherSpec* SessionState::matcher(std::string_view id) const {
  for (const auto& m : matchers) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

json state_to_json(const SessionState& s) {
  json value_maps = json::array();
  for (const auto& [_, m] : s.value_maps) value_maps.push_back(m);
  json decisions = json::array();
  for (const auto& [p, meta] : s.decisions) {
    json d = pair_json(p);
    d["actor"] = meta.actor;
    d["timestamp"] = meta.timestamp;
    decisions.push_back(std::move(d));
  }
  json history = json::array();
  for (const auto& p : s.history) history.push_back(pair_json(p));
  return json{{"config", s.config},
              {"matchers", s.matchers},
              {"weights", s.weights},
              {"candidates", s.candidates},
              {"value_maps", std::move(value_maps)},
              {"decisions", std::move(decisions)},
              {"history", std::move(history)},
              {"synonyms", s.synonyms_csv}};
}

SessionState state_from_json(const json& j) {
  SessionState s;
  s.config = j.at("config").get<EngineConfig>();
  s.matchers = j.at("matchers").get<std::vector<MatcherSpec>>();
  s.weights = j.at("weights").get<WeightVector>();
  s.candidates = j.at("candidates").get<CandidateTable>();
  for (const auto& m : j.at("value_maps")) {
    auto vm = m.get<ValueMapping>();
    Pair key{vm.source_attr, vm.target_attr};
    s.value_maps.emplace(std::move(key), std::move(vm));
  }
  for (const auto& d : j.at("decisions")) {
    s.decisions[pair_from(d)] = {d.at("actor").get<std::string>(),
                                 d.at("timestamp").get<std::string>()};
  }
  for (const auto& h : j.at("history")) s.history.insert(pair_from(h));
  s.synonyms_csv = j.at("synonyms").get<std::string>();
  if (!s.synonyms_csv.empty()) s.synonyms = SynonymTable::from_csv(s.synonyms_csv);
  return s;
}

void apply_event(const TaskData& task, SessionState& state, const ProvenanceEvent& event) {
  const json& p = event.payload;
  const MatchContext& ctx = *task.context;
  auto candidate = [&]() -> Candidate& {
    const Pair pair = pair_from(p);
    if (Candidate* c = state.candidates.find(pair)) return *c;
    Candidate& c = state.candidates.ensure(pair, ctx);
    state.candidates.recompute_aggregates(state.weights);
    return c;
  };
  auto learn = [&](Feedback feedback) {
    if (!p.value("feedback", false)) return;
    state.weights = update_weights(state.weights, feedback, pair_from(p), state.candidates);
    state.candidates.recompute_aggregates(state.weights);
  };

  switch (event.op) {
    case EventOp::kAccept: {
      Candidate& c = candidate();
      if (c.status != CandidateStatus::kAutoAccepted) c.status = CandidateStatus::kAccepted;
      if (p.contains("note")) c.note = p["note"].get<std::string>();
      state.decisions[c.pair()] = meta_of(event);
      learn(Feedback::kAccept);
      break;
    }
    case EventOp::kReject: {
      Candidate& c = candidate();
      c.status = CandidateStatus::kRejected;
      if (p.contains("note")) c.note = p["note"].get<std::string>();
      state.decisions[c.pair()] = meta_of(event);
      learn(Feedback::kReject);
      break;
    }
    case EventOp::kFlag: {
      Candidate& c = candidate();
      c.status = CandidateStatus::kFlagged;
      if (p.contains("note")) c.note = p["note"].get<std::string>();
      state.decisions.erase(c.pair());
      break;
    }
    case EventOp::kNote: {
      Candidate& c = candidate();
      c.note = p.at("note").get<std::string>();
      if (c.status == CandidateStatus::kSuggested) c.status = CandidateStatus::kFlagged;
      break;
    }
    case EventOp::kEditValueMap: {
      auto m = p.at("mapping").get<ValueMapping>();
      Pair key{m.source_attr, m.target_attr};
      if (p.value("remove", false)) {
        state.value_maps.erase(key);
      } else {
        state.value_maps[key] = std::move(m);
      }
      break;
    }
    case EventOp::kSetThreshold:
      state.config.display_cutoff = p.at("display_cutoff").get<double>();
      break;
    case EventOp::kAddMatcher: {
      auto spec = p.at("spec").get<MatcherSpec>();
      auto it = std::find_if(state.matchers.begin(), state.matchers.end(),
                             [&](const MatcherSpec& m) { return m.id == spec.id; });
      if (it != state.matchers.end()) {
        state.candidates.drop_matcher(spec.id);
        if (state.weights.weights.count(spec.id)) state.weights.remove(spec.id);
        *it = spec;
      } else {
        state.matchers.push_back(spec);
      }
      if (spec.status == MatcherStatus::kReady && p.contains("ranking") &&
          !p["ranking"].is_null()) {
        state.candidates.merge(p["ranking"].get<MatcherRanking>(), ctx);
        state.weights.add(spec.id);
      }
      state.candidates.recompute_aggregates(state.weights);
      break;
    }
    case EventOp::kRemoveMatcher: {
      const auto id = p.at("id").get<std::string>();
      std::erase_if(state.matchers, [&](const MatcherSpec& m) { return m.id == id; });
      state.candidates.drop_matcher(id);
      if (state.weights.weights.count(id)) state.weights.remove(id);
      state.candidates.recompute_aggregates(state.weights);
      break;
    }
    case EventOp::kRerun:
      for (const auto& m : state.matchers) {
        if (m.kind != MatcherKind::kBuiltin || m.status != MatcherStatus::kReady) continue;
        state.candidates.merge(run_builtin_matcher(ctx, m.id, m.top_k), ctx);
      }
      state.candidates.recompute_aggregates(state.weights);
      break;
    case EventOp::kImport: {
      const auto kind = p.at("kind").get<std::string>();
      if (kind == to_string(ImportKind::kHistoryCsv)) {
        state.history = parse_history(p.at("content").get<std::string>());
      } else if (kind == to_string(ImportKind::kSynonymsCsv)) {
        state.synonyms_csv = p.at("content").get<std::string>();
        state.synonyms = SynonymTable::from_csv(state.synonyms_csv);
      }
      break;
    }
    case EventOp::kExport:
      break;
  }
}

SessionState replay(const TaskData& task, const SessionState& initial,
                    const std::vector<ProvenanceEvent>& events) {
  SessionState state = initial;
  std::uint64_t expected = 1;
  for (const auto& e : events) {
    if (e.seq != expected++) {
      throw Error(ErrorCode::kValidation,
                  "event log gap at seq " + std::to_string(expected - 1));
    }
    apply_event(task, state, e);
  }
  return state;
}

// --- session -----------------------------------------------------------------

Session::Session(std::string id, fs::path dir, Clock clock)
    : id_(std::move(id)), dir_(std::move(dir)), clock_(std::move(clock)), created_(clock_()) {}

const TaskData& Session::task() const {
  if (!task_) throw Error(ErrorCode::kNotReady, "session has no task");
  return *task_;
}

void Session::require_ready() const {
  if (!task_) throw Error(ErrorCode::kNotReady, "session has no task");
  if (!ready_) throw Error(ErrorCode::kNotReady, "matching job has not finished");
}

void Session::begin_task(std::shared_ptr<const TaskData> task, EngineConfig config,
                         std::vector<MatcherSpec> matchers) {
  config.validate();
  task_ = std::move(task);
  ready_ = false;
  task_error_.reset();
  events_.clear();
  state_ = SessionState{};
  state_.config = config;
  std::vector<std::string> ids;
  for (auto& m : matchers) {
    m.status = MatcherStatus::kRunning;
    m.failure_reason.reset();
    ids.push_back(m.id);
  }
  state_.matchers = std::move(matchers);
  state_.weights = WeightVector::uniform(ids);
  std::vector<std::string> order;
  for (const auto& a : task_->source.attributes) order.push_back(a.name);
  state_.candidates = CandidateTable(std::move(order));
  initial_ = state_;
  if (!dir_.empty()) {
    fs::remove_all(dir_ / "initial");
    fs::remove_all(dir_ / "artifacts");
    fs::remove(dir_ / "events.jsonl");
    write_file(dir_ / "source.csv", task_->source_csv);
    write_file(dir_ / "target.csv", task_->target_csv);
    write_session_json();
  }
}

std::vector<Pair> Session::apply_easy_matches() {
  const auto pairs = detect_easy_matches(*task().context, state_.config);
  for (const auto& p : pairs) {
    Candidate& c = state_.candidates.ensure(p, *task_->context);
    c.status = CandidateStatus::kAutoAccepted;
    state_.decisions[p] = {std::string(kAutoActor), ""};
  }
  state_.candidates.recompute_aggregates(state_.weights);
  return pairs;
}

void Session::merge_matcher_result(const PluginRun& run) {
  auto it = std::find_if(state_.matchers.begin(), state_.matchers.end(),
                         [&](const MatcherSpec& m) { return m.id == run.spec.id; });
  if (it == state_.matchers.end()) {
    state_.matchers.push_back(run.spec);
  } else {
    *it = run.spec;
  }
  if (run.spec.status == MatcherStatus::kReady && run.ranking) {
    state_.candidates.merge(*run.ranking, *task().context);
  }
  // Equal weights over whatever has finished successfully so far.
  std::vector<std::string> ready;
  for (const auto& m : state_.matchers) {
    if (m.status != MatcherStatus::kFailed) ready.push_back(m.id);
  }
  state_.weights = WeightVector::uniform(ready, state_.weights.learning_rate);
  state_.candidates.recompute_aggregates(state_.weights);
}

void Session::finish_task() {
  std::vector<std::string> ready;
  std::string reasons;
  for (const auto& m : state_.matchers) {
    if (m.status == MatcherStatus::kReady) {
      ready.push_back(m.id);
    } else {
      if (!reasons.empty()) reasons += "; ";
      reasons += m.id + ": " + m.failure_reason.value_or("did not finish");
    }
  }
  if (ready.empty()) {
    fail_task("all matchers failed: " + reasons);
    throw Error(ErrorCode::kEngine, *task_error_);
  }
  state_.weights = WeightVector::uniform(ready, state_.weights.learning_rate);
  state_.candidates.recompute_aggregates(state_.weights);
  initial_ = state_;
  ready_ = true;
  save();
}

void Session::fail_task(const std::string& reason) {
  ready_ = false;
  task_error_ = reason;
}

const ProvenanceEvent& Session::append(EventOp op, const std::string& actor, json payload) {
  ProvenanceEvent e;
  e.seq = last_seq() + 1;
  e.timestamp = clock_();
  e.actor = actor;
  e.op = op;
  e.payload = std::move(payload);
  // Apply before recording so a throwing fold leaves the log untouched.
  SessionState next = state_;
  apply_event(*task_, next, e);
  state_ = std::move(next);
  events_.push_back(std::move(e));
  persist_event(events_.back());
  return events_.back();
}

DecisionOutcome Session::apply_decision(const DecisionRequest& req) {
  require_ready();
  const Candidate* current = state_.candidates.find(req.pair);
  if (!current) {
    throw Error(ErrorCode::kNotFound,
                "unknown candidate " + req.pair.source + " -> " + req.pair.target);
  }
  const bool note_same = !req.note || current->note == req.note;
  DecisionOutcome out;
  out.seq = last_seq();
  EventOp op = EventOp::kAccept;
  json payload = pair_json(req.pair);
  switch (req.action) {
    case DecisionAction::kAccept:
      if (is_accepted(current->status) && note_same) {
        out.candidate = *current;
        return out;
      }
      if (const Candidate* other = accepted_partner(state_, req.pair)) {
        throw Error(ErrorCode::kConflict, "one-to-one conflict with accepted " +
                                              other->source + " -> " + other->target);
      }
      op = EventOp::kAccept;
      // Re-accepting an auto-accepted pair only updates its note.
      payload["feedback"] = current->status != CandidateStatus::kAutoAccepted;
      break;
    case DecisionAction::kReject:
      if (current->status == CandidateStatus::kRejected && note_same) {
        out.candidate = *current;
        return out;
      }
      op = EventOp::kReject;
      payload["feedback"] = true;
      break;
    case DecisionAction::kFlag:
      if (current->status == CandidateStatus::kFlagged && note_same) {
        out.candidate = *current;
        return out;
      }
      op = EventOp::kFlag;
      break;
    case DecisionAction::kNote:
      if (!req.note || trim(*req.note).empty()) {
        throw Error(ErrorCode::kValidation, "note action requires note text");
      }
      if (note_same && current->status != CandidateStatus::kSuggested) {
        out.candidate = *current;
        return out;
      }
      op = EventOp::kNote;
      break;
  }
  if (req.note) payload["note"] = *req.note;
  out.seq = append(op, req.actor, std::move(payload)).seq;
  out.applied = true;
  out.candidate = *state_.candidates.find(req.pair);
  return out;
}

bool Session::set_display_cutoff(double cutoff, const std::string& actor) {
  require_ready();
  EngineConfig cfg = state_.config;
  cfg.display_cutoff = cutoff;
  cfg.validate();
  if (cutoff == state_.config.display_cutoff) return false;
  append(EventOp::kSetThreshold, actor, {{"display_cutoff", cutoff}});
  return true;
}

bool Session::edit_value_map(ValueMapping mapping, const std::string& actor) {
  require_ready();
  mapping = normalize_mapping(*task_, std::move(mapping));
  const Pair key{mapping.source_attr, mapping.target_attr};
  auto it = state_.value_maps.find(key);
  if (it != state_.value_maps.end() && same_mapping(it->second, mapping)) return false;
  append(EventOp::kEditValueMap, actor, {{"mapping", mapping}});
  return true;
}

json Session::value_map_view(const Pair& pair, double threshold) const {
  require_ready();
  if (!task_->source.find(pair.source)) {
    throw Error(ErrorCode::kNotFound, "unknown source attribute '" + pair.source + "'");
  }
  if (!task_->target.find(pair.target)) {
    throw Error(ErrorCode::kNotFound, "unknown target attribute '" + pair.target + "'");
  }
  const auto source_values = unique_values(task_->source, pair.source);
  const auto target_values = unique_values(task_->target, pair.target);
  json view;
  auto it = state_.value_maps.find(pair);
  if (it != state_.value_maps.end()) {
    view = it->second;
    view["stored"] = true;
  } else {
    ValueMapping m = propose_value_mapping(source_values, target_values, threshold);
    m.source_attr = pair.source;
    m.target_attr = pair.target;
    view = m;
    view["stored"] = false;
  }
  view["source_values"] = source_values;
  view["target_values"] = target_values;
  const auto& sf = task_->context->source(pair.source);
  const auto& tf = task_->context->target(pair.target);
  if (sf.type == InferredType::kNumeric && tf.type == InferredType::kNumeric &&
      !sf.numbers.empty() && !tf.numbers.empty()) {
    try {
      const auto fit = fit_affine_transform(sf.numbers, tf.numbers, Pairing::kQuantile);
      view["suggested_transform"] = {
          {"scale", fit.scale}, {"offset", fit.offset}, {"residual", fit.residual}};
    } catch (const Error&) {
      // constant source column: no transform to suggest
    }
  }
  return view;
}

void Session::add_matcher(const PluginRun& run, const std::string& actor) {
  require_ready();
  if (state_.matcher(run.spec.id)) {
    throw Error(ErrorCode::kConflict, "matcher '" + run.spec.id + "' already registered");
  }
  json payload{{"spec", run.spec}, {"ranking", nullptr}};
  if (run.spec.status == MatcherStatus::kReady && run.ranking) payload["ranking"] = *run.ranking;
  append(EventOp::kAddMatcher, actor, std::move(payload));
}

void Session::remove_matcher(std::string_view id, const std::string& actor) {
  require_ready();
  const MatcherSpec* spec = state_.matcher(id);
  if (!spec) throw Error(ErrorCode::kNotFound, "unknown matcher '" + std::string(id) + "'");
  if (spec->status == MatcherStatus::kReady) {
    const auto ready = std::count_if(state_.matchers.begin(), state_.matchers.end(),
                                     [](const MatcherSpec& m) {
                                       return m.status == MatcherStatus::kReady;
                                     });
    if (ready <= 1) {
      throw Error(ErrorCode::kValidation, "cannot remove the last ready matcher");
    }
  }
  append(EventOp::kRemoveMatcher, actor, {{"id", std::string(id)}});
}

void Session::rerun_builtins(const std::string& actor) {
  require_ready();
  append(EventOp::kRerun, actor, json::object());
}

MetricsReport Session::metrics(std::size_t k) const {
  require_ready();
  return compute_metrics(ground_truth(), state_.ranked_lists(), k);
}

ConsensusReport Session::consensus(std::size_t k) const {
  require_ready();
  return consensus_sets(ground_truth(), state_.ranked_lists(), k);
}

RankBreakdown Session::breakdown() const {
  require_ready();
  return rank_breakdown(ground_truth(), state_.ranked_lists());
}

Profile Session::profile(Side side, std::string_view attribute) const {
  return profile_attribute(task().dataset(side), attribute, state_.config.histogram_bins);
}

Explanation Session::explain(const Pair& pair) const {
  const auto& t = task();
  return explain_candidate(*t.context, pair, state_.history.empty() ? nullptr : &state_.history,
                           state_.synonyms.empty() ? nullptr : &state_.synonyms);
}

// --- export / import ---------------------------------------------------------

std::string Session::export_artifact(ExportKind kind) const {
  require_ready();
  switch (kind) {
    case ExportKind::kHarmonizedCsv: {
      std::vector<Pair> accepted;
      for (const auto& [p, c] : state_.candidates.all()) {
        if (is_accepted(c.status)) accepted.push_back(p);
      }
      if (accepted.empty()) {
        throw Error(ErrorCode::kValidation, "nothing to export: no accepted mappings");
      }
      std::vector<std::string> order;
      for (const auto& a : task_->target.attributes) order.push_back(a.name);
      return dataset_to_csv(harmonize(task_->source, order, accepted, state_.value_maps));
    }
    case ExportKind::kMappingSpec: {
      json attrs = json::array();
      for (const auto& [p, c] : state_.candidates.all()) {
        if (c.status == CandidateStatus::kSuggested) continue;
        json a = pair_json(p);
        a["status"] = to_string(c.status);
        if (c.note) a["note"] = *c.note;
        attrs.push_back(std::move(a));
      }
      json values = json::array();
      for (const auto& [p, m] : state_.value_maps) {
        json v = pair_json(p);
        json pairs = json::array();
        for (const auto& vp : m.pairs) pairs.push_back({{"from", vp.from}, {"to", vp.to}});
        v["pairs"] = std::move(pairs);
        if (m.transform) {
          v["transform"] = {{"scale", m.transform->scale}, {"offset", m.transform->offset}};
        }
        values.push_back(std::move(v));
      }
      json spec{{"version", 1},
                {"task", {{"source", task_->source_name}, {"target", task_->target_name}}},
                {"attribute_mappings", std::move(attrs)},
                {"value_mappings", std::move(values)}};
      return spec.dump(2) + "\n";
    }
    case ExportKind::kGroundTruthCsv: {
      std::string out = "source,target,label,actor,timestamp\n";
      for (const auto& [p, c] : state_.candidates.all()) {
        const bool acc = is_accepted(c.status);
        if (!acc && c.status != CandidateStatus::kRejected) continue;
        DecisionMeta meta;
        if (auto it = state_.decisions.find(p); it != state_.decisions.end()) meta = it->second;
        const std::string row[] = {p.source, p.target, acc ? "accept" : "reject", meta.actor,
                                   meta.timestamp};
        append_csv_row(out, row);
      }
      return out;
    }
    case ExportKind::kProvenance: {
      std::string out;
      for (const auto& e : events_) out += json(e).dump() + "\n";
      return out;
    }
  }
  return {};
}

void Session::record_export(ExportKind kind, const std::string& actor) {
  require_ready();
  append(EventOp::kExport, actor, {{"kind", to_string(kind)}});
}

ImportReport Session::import_decisions(
    const std::vector<std::tuple<Pair, DecisionAction, std::optional<std::string>,
                                 std::optional<DecisionMeta>>>& entries,
    const std::string& actor, ImportReport report) {
  for (const auto& [pair, action, note, meta] : entries) {
    const Candidate* current = state_.candidates.find(pair);
    const CandidateStatus status = current ? current->status : CandidateStatus::kSuggested;
    const bool note_same = !note || (current && current->note == note);
    std::optional<DecisionMeta> stored;
    if (auto it = state_.decisions.find(pair); it != state_.decisions.end()) {
      stored = it->second;
    }
    const bool meta_same = !meta || stored == meta;
    bool unchanged = false;
    EventOp op = EventOp::kAccept;
    switch (action) {
      case DecisionAction::kAccept:
        unchanged = is_accepted(status) && note_same && meta_same;
        op = EventOp::kAccept;
        break;
      case DecisionAction::kReject:
        unchanged = status == CandidateStatus::kRejected && note_same && meta_same;
        op = EventOp::kReject;
        break;
      case DecisionAction::kFlag:
        unchanged = status == CandidateStatus::kFlagged && note_same;
        op = EventOp::kFlag;
        break;
      case DecisionAction::kNote:
        unchanged = note_same;
        op = EventOp::kNote;
        break;
    }
    if (unchanged) {
      ++report.unchanged;
      continue;
    }
    if (action == DecisionAction::kAccept) {
      if (const Candidate* other = accepted_partner(state_, pair)) {
        report.conflicts.push_back(pair.source + " -> " + pair.target +
                                   " conflicts with accepted " + other->source + " -> " +
                                   other->target);
        continue;
      }
    }
    json payload = pair_json(pair);
    payload["feedback"] = false;
    if (note) payload["note"] = *note;
    if (meta) payload["meta"] = {{"actor", meta->actor}, {"timestamp", meta->timestamp}};
    append(op, actor, std::move(payload));
    ++report.applied;
  }
  return report;
}

ImportReport Session::import_artifact(ImportKind kind, std::string_view content,
                                      const std::string& actor) {
  require_ready();
  ImportReport report;
  auto known = [&](const Pair& p, const std::string& where) {
    if (!task_->source.find(p.source)) {
      report.skipped.push_back(where + ": unknown source attribute '" + p.source + "'");
      return false;
    }
    if (!task_->target.find(p.target)) {
      report.skipped.push_back(where + ": unknown target attribute '" + p.target + "'");
      return false;
    }
    return true;
  };
  using Entry = std::tuple<Pair, DecisionAction, std::optional<std::string>,
                           std::optional<DecisionMeta>>;
  std::vector<Entry> entries;

  switch (kind) {
    case ImportKind::kMappingSpec: {
      json spec;
      try {
        spec = json::parse(content.empty() ? std::string_view("{}") : content);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kParse, std::string("mapping spec: ") + e.what());
      }
      if (!spec.is_object()) throw Error(ErrorCode::kParse, "mapping spec must be an object");
      const auto attrs = spec.value("attribute_mappings", json::array());
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        const auto& a = attrs[i];
        const std::string where = "attribute_mappings[" + std::to_string(i) + "]";
        if (!a.is_object() || !a.contains("source") || !a.contains("target")) {
          report.skipped.push_back(where + ": missing source or target");
          continue;
        }
        Pair p = pair_from(a);
        if (!known(p, where)) continue;
        std::optional<std::string> note;
        if (a.contains("note")) note = a["note"].get<std::string>();
        const auto status = candidate_status_from_string(a.value("status", "accepted"));
        switch (status) {
          case CandidateStatus::kAccepted:
          case CandidateStatus::kAutoAccepted:
            entries.emplace_back(p, DecisionAction::kAccept, note, std::nullopt);
            break;
          case CandidateStatus::kRejected:
            entries.emplace_back(p, DecisionAction::kReject, note, std::nullopt);
            break;
          case CandidateStatus::kFlagged:
            entries.emplace_back(p, DecisionAction::kFlag, note, std::nullopt);
            break;
          case CandidateStatus::kSuggested:
            if (note) entries.emplace_back(p, DecisionAction::kNote, note, std::nullopt);
            break;
        }
      }
      report = import_decisions(entries, actor, std::move(report));
      const auto values = spec.value("value_mappings", json::array());
      for (std::size_t i = 0; i < values.size(); ++i) {
        const std::string where = "value_mappings[" + std::to_string(i) + "]";
        ValueMapping m;
        try {
          m = values[i].get<ValueMapping>();
        } catch (const json::exception&) {
          report.skipped.push_back(where + ": malformed entry");
          continue;
        }
        if (!known({m.source_attr, m.target_attr}, where)) continue;
        try {
          m = normalize_mapping(*task_, std::move(m));
        } catch (const Error& e) {
          report.conflicts.push_back(where + ": " + e.what());
          continue;
        }
        auto it = state_.value_maps.find({m.source_attr, m.target_attr});
        if (it != state_.value_maps.end() && same_mapping(it->second, m)) {
          ++report.unchanged;
          continue;
        }
        append(EventOp::kEditValueMap, actor, {{"mapping", m}});
        ++report.applied;
      }
      break;
    }
    case ImportKind::kGroundTruthCsv: {
      for (const auto& row : parse_labeled_csv(content, true)) {
        const std::string where = "line " + std::to_string(row.line);
        if (!row.accept) {
          report.skipped.push_back(where + ": unrecognized label");
          continue;
        }
        if (!known(row.pair, where)) continue;
        entries.emplace_back(row.pair,
                             *row.accept ? DecisionAction::kAccept : DecisionAction::kReject,
                             std::nullopt, row.meta);
      }
      report = import_decisions(entries, actor, std::move(report));
      break;
    }
    case ImportKind::kHistoryCsv:
    case ImportKind::kSynonymsCsv: {
      // Validate before logging so the fold cannot fail on replay.
      std::size_t rows = 0;
      if (kind == ImportKind::kHistoryCsv) {
        rows = parse_history(content).size();
      } else {
        rows = parse_csv(content).size();
      }
      append(EventOp::kImport, actor,
             {{"kind", to_string(kind)}, {"content", std::string(content)}, {"rows", rows}});
      report.applied = rows;
      return report;
    }
  }
  if (report.applied > 0) {
    json summary = report;
    summary["kind"] = to_string(kind);
    append(EventOp::kImport, actor, std::move(summary));
  }
  return report;
}

// --- persistence -------------------------------------------------------------

void Session::write_session_json() const {
  json meta{{"id", id_}, {"created", created_}, {"updated", clock_()}};
  if (task_) {
    meta["task"] = {{"source_name", task_->source_name},
                    {"target_name", task_->target_name},
                    {"target_is_schema", task_->target_is_schema}};
  }
  meta["ready"] = ready_;
  if (task_error_) meta["error"] = *task_error_;
  write_file(dir_ / "session.json", meta.dump(2) + "\n");
}

void Session::persist_event(const ProvenanceEvent& event) const {
  if (dir_.empty()) return;
  fs::create_directories(dir_);
  std::ofstream out(dir_ / "events.jsonl", std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to event log");
  out << json(event).dump() << '\n';
  out.flush();
  persist_current();
}

void Session::persist_current() const {
  const json current = state_to_json(state_);
  for (auto part : kStateParts) {
    write_file(dir_ / "artifacts" / (std::string(part) + ".json"),
               current.at(std::string(part)).dump(2) + "\n");
  }
  write_session_json();
}

void Session::save() const {
  if (dir_.empty()) return;
  write_session_json();
  if (!task_) return;
  write_file(dir_ / "source.csv", task_->source_csv);
  write_file(dir_ / "target.csv", task_->target_csv);
  if (!ready_) return;
  const json initial = state_to_json(initial_);
  for (auto part : kStateParts) {
    write_file(dir_ / "initial" / (std::string(part) + ".json"),
               initial.at(std::string(part)).dump(2) + "\n");
  }
  json profiles = json::object();
  for (Side side : {Side::kSource, Side::kTarget}) {
    auto& bucket = profiles[std::string(to_string(side))];
    for (const auto& a : task_->dataset(side).attributes) {
      bucket[a.name] = profile_attribute(task_->dataset(side), a.name,
                                         state_.config.histogram_bins);
    }
  }
  write_file(dir_ / "artifacts" / "profiles.json", profiles.dump(2) + "\n");
  write_file(dir_ / "artifacts" / "ontology.json",
             json{{"source", task_->source_ontology}, {"target", task_->target_ontology}}
                     .dump(2) + "\n");
  std::string log;
  for (const auto& e : events_) log += json(e).dump() + "\n";
  write_file(dir_ / "events.jsonl", log);
  persist_current();
}

std::unique_ptr<Session> Session::load(const fs::path& dir, Clock clock) {
  const json meta = json::parse(read_file(dir / "session.json"));
  auto session = std::make_unique<Session>(meta.at("id").get<std::string>(), dir, clock);
  session->created_ = meta.value("created", session->created_);
  if (!meta.contains("task") || !fs::exists(dir / "initial" / "candidates.json")) {
    return session;
  }
  const auto& t = meta["task"];
  session->task_ = TaskData::build(read_file(dir / "source.csv"), read_file(dir / "target.csv"),
                                   t.value("target_is_schema", false),
                                   t.value("source_name", std::string("source.csv")),
                                   t.value("target_name", std::string("target.csv")));
  json initial = json::object();
  for (auto part : kStateParts) {
    initial[std::string(part)] =
        json::parse(read_file(dir / "initial" / (std::string(part) + ".json")));
  }
  session->initial_ = state_from_json(initial);
  if (fs::exists(dir / "events.jsonl")) {
    std::istringstream log(read_file(dir / "events.jsonl"));
    std::string line;
    while (std::getline(log, line)) {
      if (trim(line).empty()) continue;
      session->events_.push_back(json::parse(line).get<ProvenanceEvent>());
    }
  }
  session->state_ = replay(*session->task_, session->initial_, session->events_);
  session->ready_ = true;
  return session;
}

}  // namespace matchbench
