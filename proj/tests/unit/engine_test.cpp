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

#include "matchbench/engine.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "matchbench/error.hpp"

namespace matchbench {
namespace {

Dataset annotated(const std::string& csv, Side side) {
  auto ds = load_csv(csv, side);
  annotate_dataset(ds);
  return ds;
}

MatcherRanking ranking(std::string id, std::string source, std::vector<std::string> targets) {
  MatcherRanking r;
  r.matcher_id = std::move(id);
  auto& list = r.per_source[source];
  double score = 0.9;
  for (auto& t : targets) {
    list.push_back({std::move(t), score});
    score -= 0.1;
  }
  return r;
}

class WeightUpdate : public ::testing::Test {
 protected:
  WeightUpdate()
      : source_(annotated("s\n1\n", Side::kSource)),
        target_(annotated("t1,t2,t3,t4,t5\n1,2,3,4,5\n", Side::kTarget)),
        ctx_(source_, target_),
        table_({"s"}) {}
  Dataset source_;
  Dataset target_;
  MatchContext ctx_;
  CandidateTable table_;
};

TEST_F(WeightUpdate, SingleAcceptRewardsOnlyRankingMatcher) {
  table_.merge(ranking("A", "s", {"t1"}), ctx_);
  table_.merge(ranking("B", "s", {"t2"}), ctx_);
  const auto w = update_weights(WeightVector::uniform({"A", "B"}), Feedback::kAccept,
                                {"s", "t1"}, table_);
  EXPECT_NEAR(w.weight("A"), 0.52497918747894, 1e-12);
  EXPECT_NEAR(w.weight("B"), 0.47502081252106, 1e-12);
}

TEST_F(WeightUpdate, RepeatedAcceptsConvergeTowardBetterRanker) {
  table_.merge(ranking("A", "s", {"t1", "t2", "t3", "t4", "t5"}), ctx_);
  table_.merge(ranking("B", "s", {"t2", "t3", "t4", "t5", "t1"}), ctx_);
  auto w = WeightVector::uniform({"A", "B"}, 0.1);
  for (int i = 0; i < 20; ++i) w = update_weights(w, Feedback::kAccept, {"s", "t1"}, table_);
  EXPECT_NEAR(w.weight("A"), 0.8320183851339247, 1e-12);
  EXPECT_NEAR(w.weight("B"), 0.16798161486607519, 1e-12);
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
}

TEST_F(WeightUpdate, RejectPenalizesAndUnknownPairThrows) {
  table_.merge(ranking("A", "s", {"t1"}), ctx_);
  table_.merge(ranking("B", "s", {"t2"}), ctx_);
  const auto w = update_weights(WeightVector::uniform({"A", "B"}), Feedback::kReject,
                                {"s", "t1"}, table_);
  EXPECT_LT(w.weight("A"), 0.5);
  EXPECT_THROW(update_weights(w, Feedback::kAccept, {"s", "t5"}, table_), Error);
}

TEST(WeightVector, AddTakesEqualShare) {
  auto w = WeightVector::uniform({"a", "b"});
  w.add("c");
  EXPECT_NEAR(w.weight("c"), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(w.weight("a"), 1.0 / 3.0, 1e-12);
  w.remove("a");
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(w.weight("a"), 0.0);
}

TEST(EngineConfig, ValidateOrdering) {
  EngineConfig c;
  EXPECT_NO_THROW(c.validate());
  c.display_cutoff = 0.99;
  EXPECT_THROW(c.validate(), Error);
  c.display_cutoff = 0.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(SortRanked, ScoreThenName) {
  std::vector<ScoredTarget> v = {{"b", 0.5}, {"a", 0.5}, {"c", 0.9}};
  sort_ranked(v);
  EXPECT_EQ(v, (std::vector<ScoredTarget>{{"c", 0.9}, {"a", 0.5}, {"b", 0.5}}));
}

TEST(EasyMatches, UniqueBestRequired) {
  const auto s = annotated("age,PatientName\n1,x\n", Side::kSource);
  const auto tied = annotated("age min,age max,patient_name\n1,2,x\n", Side::kTarget);
  EngineConfig cfg;
  cfg.easy_threshold = 0.4;
  cfg.display_cutoff = 0.3;
  const MatchContext a(s, tied);
  EXPECT_EQ(detect_easy_matches(a, cfg), (std::vector<Pair>{{"PatientName", "patient_name"}}));

  const auto single = annotated("age min,patient_name\n1,x\n", Side::kTarget);
  const MatchContext b(s, single);
  EXPECT_EQ(detect_easy_matches(b, cfg),
            (std::vector<Pair>{{"age", "age min"}, {"PatientName", "patient_name"}}));
  cfg.easy_threshold = 0.95;
  cfg.display_cutoff = 0.4;
  EXPECT_EQ(detect_easy_matches(b, cfg), (std::vector<Pair>{{"PatientName", "patient_name"}}));
}

TEST(CandidateTable, MergeDropAndRanking) {
  const auto s = annotated("age,site\n1,x\n", Side::kSource);
  const auto t = annotated("age_years,body_site,other\n1,x,y\n", Side::kTarget);
  const MatchContext ctx(s, t);
  CandidateTable table({"age", "site"});
  const auto edit = run_builtin_matcher(ctx, kNameEdit, 2);
  table.merge(edit, ctx);
  table.merge(ranking("ext", "age", {"other"}), ctx);
  const auto* c = table.find({"age", "other"});
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->scores.count("ext"), 1u);
  EXPECT_EQ(c->scores.count(std::string(kNameEdit)), 1u);

  table.recompute_aggregates(WeightVector::uniform({std::string(kNameEdit), "ext"}));
  const auto ranked = table.ranked();
  ASSERT_FALSE(ranked.empty());
  EXPECT_EQ(ranked.front()->source, "age");
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    if (ranked[i]->source == ranked[i - 1]->source) {
      EXPECT_GE(ranked[i - 1]->aggregate, ranked[i]->aggregate);
    }
  }

  const auto before = table.size();
  table.drop_matcher("ext");
  EXPECT_LE(table.size(), before);
  EXPECT_EQ(table.rankings().count("ext"), 0u);
  for (const auto& [_, cand] : table.all()) EXPECT_EQ(cand.scores.count("ext"), 0u);
}

TEST(CandidateTable, JsonRoundTrip) {
  const auto s = annotated("age,site\n1,x\n", Side::kSource);
  const auto t = annotated("age_years,body_site\n1,x\n", Side::kTarget);
  const MatchContext ctx(s, t);
  CandidateTable table({"age", "site"});
  table.merge(run_builtin_matcher(ctx, kNameTrigram, 10), ctx);
  nlohmann::json j = table;
  CandidateTable back = j.get<CandidateTable>();
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(GenerateCandidates, FailedMatchersAreReported) {
  const auto s = annotated("age\n1\n", Side::kSource);
  const auto t = annotated("age_years\n1\n", Side::kTarget);
  const MatchContext ctx(s, t);
  std::vector<MatcherSpec> specs = {MatcherSpec::builtin(kNameEdit),
                                    MatcherSpec::external("gone", {"/nonexistent/plugin"})};
  EngineConfig cfg;
  cfg.plugin_timeout = std::chrono::duration<double>(5.0);
  const auto result = generate_candidates(ctx, specs, WeightVector::uniform({"name_edit", "gone"}), cfg);
  ASSERT_EQ(result.matchers.size(), 2u);
  EXPECT_EQ(result.matchers[1].status, MatcherStatus::kFailed);
  EXPECT_TRUE(result.matchers[1].failure_reason.has_value());
  EXPECT_NEAR(result.weights.weight("name_edit"), 1.0, 1e-12);
  EXPECT_NE(result.table.find({"age", "age_years"}), nullptr);

  std::vector<MatcherSpec> bad = {MatcherSpec::external("gone", {"/nonexistent/plugin"})};
  EXPECT_THROW(generate_candidates(ctx, bad, WeightVector::uniform({"gone"}), cfg), Error);
}

}  // namespace
}  // namespace matchbench
