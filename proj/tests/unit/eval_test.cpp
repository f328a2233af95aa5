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

#include "matchbench/eval.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "matchbench/error.hpp"
#include "metric_oracle.hpp"

namespace matchbench {
namespace {

struct HandCase {
  GroundTruth gt;
  RankedLists lists;
  HandCase() {
    gt.accepted = {{"s1", "t1"}, {"s2", "t2"}, {"s3", "t3"}};
    lists["A"] = {{"s1", {"t1", "t9"}}, {"s2", {"t9", "t2"}}, {"s3", {}}};
    lists["B"] = {{"s1", {"t1"}}, {"s3", {"t3"}}};
  }
};

TEST(ComputeMetrics, HandComputed) {
  const HandCase c;
  const auto r = compute_metrics(c.gt, c.lists, 10);
  EXPECT_EQ(r.evaluated_sources, 3u);
  const auto& a = r.per_matcher.at("A");
  EXPECT_DOUBLE_EQ(a.mrr, 0.5);
  EXPECT_DOUBLE_EQ(a.precision_at_1, 0.5);
  EXPECT_DOUBLE_EQ(a.recall_at_k, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(a.f1, 4.0 / 7.0);
  const auto& b = r.per_matcher.at("B");
  EXPECT_DOUBLE_EQ(b.mrr, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(b.precision_at_1, 1.0);

  const auto k1 = compute_metrics(c.gt, c.lists, 1);
  EXPECT_DOUBLE_EQ(k1.per_matcher.at("A").recall_at_k, 1.0 / 3.0);
}

TEST(ComputeMetrics, EmptyGroundTruthIsFlagged) {
  const HandCase c;
  const auto r = compute_metrics(GroundTruth{}, c.lists, 10);
  EXPECT_TRUE(r.insufficient_ground_truth);
  EXPECT_EQ(r.evaluated_sources, 0u);
}

TEST(ComputeMetrics, CountsTrivialGroundTruth) {
  HandCase c;
  c.gt.trivial = {{"s1", "t1"}};
  const auto r = compute_metrics(c.gt, c.lists, 10);
  EXPECT_EQ(r.trivial_ground_truth, 1u);
  EXPECT_EQ(r.manual_ground_truth, 2u);
}

TEST(ConsensusSets, ExactMemberships) {
  const HandCase c;
  const auto r = consensus_sets(c.gt, c.lists, 10);
  ASSERT_EQ(r.subsets.size(), 3u);
  EXPECT_EQ(r.subsets[0].matchers, (std::vector<std::string>{"A"}));
  EXPECT_EQ(r.subsets[1].matchers, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(r.subsets[2].matchers, (std::vector<std::string>{"B"}));
  std::size_t total = 0;
  for (const auto& s : r.subsets) total += s.count;
  EXPECT_EQ(total, 3u);
}

TEST(RankBreakdown, Buckets) {
  HandCase c;
  std::vector<std::string> long_list;
  for (int i = 0; i < 11; ++i) long_list.push_back("x" + std::to_string(i));
  long_list.push_back("t3");  // rank 12 counts as absent
  c.lists["C"] = {{"s1", {"a", "b", "c", "t1"}}, {"s2", {"a", "b", "t2"}}, {"s3", long_list}};
  const auto r = rank_breakdown(c.gt, c.lists);
  const auto& cb = r.per_matcher.at("C");
  EXPECT_EQ(cb.rank_1, 0u);
  EXPECT_EQ(cb.rank_2_3, 1u);
  EXPECT_EQ(cb.rank_4_10, 1u);
  EXPECT_EQ(cb.absent, 1u);
  EXPECT_EQ(r.per_matcher.at("A").total(), 3u);
}

TEST(GroundTruth, ValidateOneToOne) {
  GroundTruth gt;
  gt.accepted = {{"a", "x"}, {"b", "x"}};
  EXPECT_THROW(gt.validate(), Error);
  gt.accepted = {{"a", "x"}};
  gt.rejected = {{"a", "x"}};
  EXPECT_THROW(gt.validate(), Error);
}

TEST(MetricOracle, RandomInstancesAgree) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto inst = fixtures::random_metric_instance(seed, 20, 6);
    const auto got = compute_metrics(inst.gt, inst.lists, inst.k);
    const auto want = oracle::metrics(inst.gt, inst.lists, inst.k);
    ASSERT_EQ(got.per_matcher.size(), want.size());
    for (const auto& [id, m] : want) {
      const auto& g = got.per_matcher.at(id);
      EXPECT_NEAR(g.mrr, m.mrr, 1e-12) << seed << " " << id;
      EXPECT_NEAR(g.precision_at_1, m.precision_at_1, 1e-12) << seed << " " << id;
      EXPECT_NEAR(g.recall_at_k, m.recall_at_k, 1e-12) << seed << " " << id;
      EXPECT_NEAR(g.f1, m.f1, 1e-12) << seed << " " << id;
    }

    const auto cons = consensus_sets(inst.gt, inst.lists, inst.k);
    const auto want_cons = oracle::consensus(inst.gt, inst.lists, inst.k);
    ASSERT_EQ(cons.subsets.size(), want_cons.size()) << seed;
    for (std::size_t i = 0; i < want_cons.size(); ++i) {
      EXPECT_EQ(cons.subsets[i].matchers, want_cons[i].first) << seed;
      EXPECT_EQ(cons.subsets[i].count, want_cons[i].second) << seed;
    }

    const auto br = rank_breakdown(inst.gt, inst.lists);
    for (const auto& [id, buckets] : oracle::breakdown(inst.gt, inst.lists)) {
      const auto& b = br.per_matcher.at(id);
      EXPECT_EQ((std::vector<std::size_t>{b.rank_1, b.rank_2_3, b.rank_4_10, b.absent}), buckets)
          << seed << " " << id;
    }
  }
}

}  // namespace
}  // namespace matchbench
