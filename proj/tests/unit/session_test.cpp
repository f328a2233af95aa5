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

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "matchbench/csv.hpp"
#include "matchbench/error.hpp"
#include "matchbench/pipeline.hpp"

namespace matchbench {
namespace {

namespace fs = std::filesystem;

Session::Clock counting_clock() {
  auto n = std::make_shared<int>(0);
  return [n] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2026-01-01T00:%02d:%02dZ", (*n / 60) % 60, *n % 60);
    ++*n;
    return std::string(buf);
  };
}

std::vector<MatcherSpec> name_matchers() {
  return {MatcherSpec::builtin(kNameEdit), MatcherSpec::builtin(kNameTrigram),
          MatcherSpec::builtin(kValueOverlap)};
}

std::unique_ptr<Session> ready_session(const fixtures::TaskFixture& fx, fs::path dir = {}) {
  auto s = std::make_unique<Session>("s1", std::move(dir), counting_clock());
  s->begin_task(TaskData::build(fx.source_csv, fx.target_csv, false), EngineConfig{},
                name_matchers());
  run_task_pipeline(*s);
  return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("matchbench-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

class SessionTest : public ::testing::Test {
 protected:
  SessionTest() : fx_(fixtures::aligned_task(12, 4)), s_(ready_session(fx_)) {}
  DecisionOutcome decide(const Pair& p, DecisionAction a, std::optional<std::string> note = {}) {
    return s_->apply_decision({p, a, std::move(note), "alice"});
  }
  fixtures::TaskFixture fx_;
  std::unique_ptr<Session> s_;
};

TEST(SessionLifecycle, DecisionsWaitForTask) {
  const auto fx = fixtures::aligned_task(5, 2);
  Session s("x");
  EXPECT_FALSE(s.ready());
  s.begin_task(TaskData::build(fx.source_csv, fx.target_csv, false), EngineConfig{},
               name_matchers());
  EXPECT_EQ(code_of([&] { s.apply_decision({fx.truth[0], DecisionAction::kAccept}); }),
            ErrorCode::kNotReady);
  run_task_pipeline(s);
  EXPECT_TRUE(s.ready());
  EXPECT_NO_THROW(s.apply_decision({fx.truth[0], DecisionAction::kAccept}));
}

TEST(SessionLifecycle, AllMatchersFailing) {
  const auto fx = fixtures::aligned_task(5, 2);
  Session s("x");
  EngineConfig cfg;
  cfg.plugin_timeout = std::chrono::duration<double>(5.0);
  s.begin_task(TaskData::build(fx.source_csv, fx.target_csv, false), cfg,
               {MatcherSpec::external("bad", {MATCHBENCH_FIXTURE_PLUGIN, "crash"})});
  EXPECT_THROW(run_task_pipeline(s), Error);
  EXPECT_FALSE(s.ready());
  ASSERT_TRUE(s.task_error().has_value());
  EXPECT_NE(s.task_error()->find("exited with code 3"), std::string::npos);
}

TEST(SessionLifecycle, EasyMatchesAreAutoAccepted) {
  const auto fx = fixtures::easy_match_task(10, 10);
  auto s = ready_session(fx);
  const auto gt = s->ground_truth();
  EXPECT_EQ(gt.accepted.size(), 10u);
  EXPECT_EQ(gt.trivial.size(), 10u);
  for (const auto& p : fx.truth) {
    const auto* c = s->state().candidates.find(p);
    ASSERT_NE(c, nullptr) << p.source;
    EXPECT_EQ(c->status, CandidateStatus::kAutoAccepted);
  }
}

TEST_F(SessionTest, AcceptIsIdempotentAndLogged) {
  const Pair p = fx_.truth[0];
  ASSERT_NE(s_->state().candidates.find(p), nullptr);
  const auto before = s_->state().weights;
  const auto first = decide(p, DecisionAction::kAccept);
  EXPECT_TRUE(first.applied);
  EXPECT_EQ(first.seq, 1u);
  EXPECT_EQ(first.candidate.status, CandidateStatus::kAccepted);
  EXPECT_NE(nlohmann::json(s_->state().weights), nlohmann::json(before));
  EXPECT_NEAR(s_->state().weights.sum(), 1.0, 1e-9);

  const auto again = decide(p, DecisionAction::kAccept);
  EXPECT_FALSE(again.applied);
  EXPECT_EQ(again.seq, 1u);
  EXPECT_EQ(s_->events().size(), 1u);
  EXPECT_EQ(s_->events()[0].op, EventOp::kAccept);
  EXPECT_EQ(s_->events()[0].actor, "alice");
  EXPECT_EQ(s_->ground_truth().accepted, std::set<Pair>{p});
}

TEST_F(SessionTest, ConflictsAndUnknownPairs) {
  decide(fx_.truth[0], DecisionAction::kAccept);
  const auto& cands = s_->state().candidates.all();
  std::optional<Pair> rival;
  for (const auto& [pair, _] : cands) {
    if (pair.source == fx_.truth[0].source && pair != fx_.truth[0]) rival = pair;
  }
  ASSERT_TRUE(rival.has_value());
  EXPECT_EQ(code_of([&] { decide(*rival, DecisionAction::kAccept); }), ErrorCode::kConflict);
  EXPECT_NO_THROW(decide(*rival, DecisionAction::kReject));
  EXPECT_EQ(code_of([&] { decide({"nope", "nada"}, DecisionAction::kAccept); }),
            ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { decide(fx_.truth[1], DecisionAction::kNote); }),
            ErrorCode::kValidation);
}

TEST_F(SessionTest, FlagAndNote) {
  decide(fx_.truth[0], DecisionAction::kAccept);
  const auto flagged = decide(fx_.truth[0], DecisionAction::kFlag, "check units");
  EXPECT_EQ(flagged.candidate.status, CandidateStatus::kFlagged);
  EXPECT_EQ(flagged.candidate.note, "check units");
  EXPECT_TRUE(s_->ground_truth().accepted.empty());

  const auto noted = decide(fx_.truth[1], DecisionAction::kNote, "maybe");
  EXPECT_TRUE(noted.applied);
  EXPECT_EQ(noted.candidate.note, "maybe");
  EXPECT_FALSE(decide(fx_.truth[1], DecisionAction::kNote, "maybe").applied);
}

TEST_F(SessionTest, ThresholdAndMatcherEvents) {
  EXPECT_TRUE(s_->set_display_cutoff(0.5, "alice"));
  EXPECT_FALSE(s_->set_display_cutoff(0.5, "alice"));
  EXPECT_EQ(code_of([&] { s_->set_display_cutoff(0.99, "alice"); }), ErrorCode::kValidation);
  s_->remove_matcher(kValueOverlap, "alice");
  EXPECT_EQ(s_->state().matcher(kValueOverlap), nullptr);
  EXPECT_NEAR(s_->state().weights.sum(), 1.0, 1e-9);
  s_->rerun_builtins("alice");
  std::vector<EventOp> ops;
  for (const auto& e : s_->events()) ops.push_back(e.op);
  EXPECT_EQ(ops, (std::vector<EventOp>{EventOp::kSetThreshold, EventOp::kRemoveMatcher,
                                        EventOp::kRerun}));
}

TEST_F(SessionTest, ExportFormats) {
  EXPECT_EQ(code_of([&] { s_->export_artifact(ExportKind::kHarmonizedCsv); }),
            ErrorCode::kValidation);
  decide(fx_.truth[0], DecisionAction::kAccept);
  decide(fx_.truth[2], DecisionAction::kAccept);
  decide(fx_.truth[3], DecisionAction::kReject);

  const auto gt = parse_csv(s_->export_artifact(ExportKind::kGroundTruthCsv));
  ASSERT_EQ(gt.size(), 4u);
  EXPECT_EQ(gt[0], (CsvRow{"source", "target", "label", "actor", "timestamp"}));
  std::size_t rejected = 0;
  for (std::size_t i = 1; i < gt.size(); ++i) {
    EXPECT_EQ(gt[i][3], "alice");
    if (gt[i][2] == "reject") ++rejected;
  }
  EXPECT_EQ(rejected, 1u);

  const auto spec = nlohmann::json::parse(s_->export_artifact(ExportKind::kMappingSpec));
  EXPECT_EQ(spec["version"], 1);
  EXPECT_EQ(spec["attribute_mappings"].size(), 3u);

  const auto harmonized = parse_csv(s_->export_artifact(ExportKind::kHarmonizedCsv));
  EXPECT_EQ(harmonized[0].size(), 2u);
  EXPECT_EQ(harmonized.size(), 21u);

  std::istringstream log(s_->export_artifact(ExportKind::kProvenance));
  std::string line;
  std::uint64_t seq = 0;
  while (std::getline(log, line)) {
    const auto e = nlohmann::json::parse(line).get<ProvenanceEvent>();
    EXPECT_EQ(e.seq, ++seq);
  }
  EXPECT_EQ(seq, 3u);
}

TEST_F(SessionTest, ValueMapEditsAreNormalized) {
  const Pair p = fx_.truth[1];  // categorical column pair
  const auto view = s_->value_map_view(p, 0.5);
  EXPECT_FALSE(view["stored"].get<bool>());
  const auto values = view["source_values"].get<std::vector<std::string>>();
  ASSERT_GE(values.size(), 2u);

  ValueMapping m;
  m.source_attr = p.source;
  m.target_attr = p.target;
  m.pairs = {{" " + values[1] + " ", "B", 0.0}, {values[0], "A", 0.0}};
  EXPECT_TRUE(s_->edit_value_map(m, "alice"));
  EXPECT_FALSE(s_->edit_value_map(m, "alice"));
  const auto& stored = s_->state().value_maps.at(p);
  EXPECT_TRUE(std::is_sorted(stored.pairs.begin(), stored.pairs.end(),
                             [](auto& a, auto& b) { return a.from < b.from; }));
  EXPECT_EQ(stored.unmapped_source.size(), values.size() - 2);

  m.pairs.push_back({values[0], "C", 0.0});
  EXPECT_EQ(code_of([&] { s_->edit_value_map(m, "alice"); }), ErrorCode::kValidation);
  EXPECT_TRUE(s_->value_map_view(p, 0.5)["stored"].get<bool>());
}

TEST_F(SessionTest, ReplayReproducesState) {
  decide(fx_.truth[0], DecisionAction::kAccept);
  decide(fx_.truth[1], DecisionAction::kReject);
  decide(fx_.truth[2], DecisionAction::kFlag, "odd");
  s_->set_display_cutoff(0.3, "bob");
  s_->remove_matcher(kNameTrigram, "bob");
  decide(fx_.truth[3], DecisionAction::kAccept);
  const auto replayed = replay(s_->task(), s_->initial_state(), s_->events());
  EXPECT_EQ(state_to_json(replayed), state_to_json(s_->state()));

  auto gapped = s_->events();
  gapped.erase(gapped.begin() + 1);
  EXPECT_THROW(replay(s_->task(), s_->initial_state(), gapped), Error);
}

TEST_F(SessionTest, RoundTripThroughFreshSession) {
  decide(fx_.truth[0], DecisionAction::kAccept);
  decide(fx_.truth[1], DecisionAction::kAccept);
  decide(fx_.truth[2], DecisionAction::kReject);
  decide(fx_.truth[4], DecisionAction::kFlag, "units?");
  decide(fx_.truth[5], DecisionAction::kNote, "later");
  ValueMapping m;
  m.source_attr = fx_.truth[1].source;
  m.target_attr = fx_.truth[1].target;
  const auto values = s_->value_map_view(fx_.truth[1], 0.5)["source_values"]
                          .get<std::vector<std::string>>();
  m.pairs = {{values[0], "mapped", 0.0}};
  s_->edit_value_map(m, "alice");

  const auto spec = s_->export_artifact(ExportKind::kMappingSpec);
  const auto gt = s_->export_artifact(ExportKind::kGroundTruthCsv);

  auto fresh = ready_session(fx_);
  const auto r1 = fresh->import_artifact(ImportKind::kMappingSpec, spec);
  EXPECT_FALSE(r1.partial_failure());
  const auto r2 = fresh->import_artifact(ImportKind::kGroundTruthCsv, gt);
  EXPECT_FALSE(r2.partial_failure());
  EXPECT_EQ(fresh->export_artifact(ExportKind::kMappingSpec), spec);
  EXPECT_EQ(fresh->export_artifact(ExportKind::kGroundTruthCsv), gt);
  for (const auto& e : fresh->events()) EXPECT_EQ(e.actor, kImportActor);

  const auto again = fresh->import_artifact(ImportKind::kMappingSpec, spec);
  EXPECT_EQ(again.applied, 0u);
}

TEST_F(SessionTest, ImportReportsUnknownAndConflicting) {
  const std::string csv = "source,target,label\n" + fx_.truth[0].source + "," +
                          fx_.truth[0].target + ",accept\nghost,phantom,accept\n" +
                          fx_.truth[0].source + "," + fx_.truth[1].target + ",accept\n";
  const auto r = s_->import_artifact(ImportKind::kGroundTruthCsv, csv);
  EXPECT_EQ(r.applied, 1u);
  EXPECT_EQ(r.skipped.size(), 1u);
  EXPECT_EQ(r.conflicts.size(), 1u);
  EXPECT_TRUE(r.partial_failure());
  EXPECT_THROW(s_->import_artifact(ImportKind::kGroundTruthCsv, "a,b\n1\n"), ParseError);
}

TEST_F(SessionTest, HistoryAndSynonymsFeedExplanations) {
  const Pair p = fx_.truth[0];
  s_->import_artifact(ImportKind::kHistoryCsv, "source,target\n" + p.source + "," + p.target + "\n");
  s_->import_artifact(ImportKind::kSynonymsCsv, p.source + "," + p.target + "\n");
  const auto e = s_->explain(p);
  EXPECT_EQ(e.criterion(Criterion::kHistoricalMappings).score, 1.0);
  EXPECT_EQ(e.criterion(Criterion::kDomainKnowledge).score, 1.0);
  const auto replayed = replay(s_->task(), s_->initial_state(), s_->events());
  EXPECT_EQ(state_to_json(replayed), state_to_json(s_->state()));
}

TEST_F(SessionTest, MetricsFollowDecisions) {
  EXPECT_TRUE(s_->metrics(10).insufficient_ground_truth);
  for (std::size_t i = 0; i < 6; ++i) decide(fx_.truth[i], DecisionAction::kAccept);
  const auto m = s_->metrics(10);
  EXPECT_FALSE(m.insufficient_ground_truth);
  EXPECT_EQ(m.evaluated_sources, 6u);
  EXPECT_EQ(m.snapshot_seq, s_->last_seq());
  EXPECT_EQ(m.per_matcher.size(), 3u);
  EXPECT_EQ(s_->breakdown().per_matcher.at(std::string(kNameEdit)).total(), 6u);
}

TEST(SessionPersistence, LoadRestoresStateAndLog) {
  TempDir tmp;
  const auto fx = fixtures::aligned_task(10, 3);
  auto s = ready_session(fx, tmp.path() / "s1");
  s->apply_decision({fx.truth[0], DecisionAction::kAccept, {}, "carol"});
  s->apply_decision({fx.truth[1], DecisionAction::kReject, {}, "carol"});
  s->set_display_cutoff(0.35, "carol");
  s->save();

  const auto loaded = Session::load(tmp.path() / "s1");
  ASSERT_TRUE(loaded->ready());
  EXPECT_EQ(loaded->id(), "s1");
  EXPECT_EQ(state_to_json(loaded->state()), state_to_json(s->state()));
  ASSERT_EQ(loaded->events().size(), s->events().size());
  for (std::size_t i = 0; i < s->events().size(); ++i) {
    EXPECT_EQ(nlohmann::json(loaded->events()[i]), nlohmann::json(s->events()[i]));
  }
  EXPECT_EQ(loaded->export_artifact(ExportKind::kGroundTruthCsv),
            s->export_artifact(ExportKind::kGroundTruthCsv));
  EXPECT_TRUE(fs::exists(tmp.path() / "s1" / "events.jsonl"));
}

}  // namespace
}  // namespace matchbench
