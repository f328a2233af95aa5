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

#ifndef MATCHBENCH_EVAL_HPP_
#define MATCHBENCH_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/pair.hpp"

namespace matchbench {

struct GroundTruth {
  std::set<Pair> accepted;
  std::set<Pair> rejected;
  // Subset of `accepted` that came from easy-match auto-acceptance.
  std::set<Pair> trivial;
  std::uint64_t snapshot_seq = 0;

  // Throws Validation on overlap or a violated one-to-one constraint.
  void validate() const;
};

// matcher id -> source -> ranked targets (best first).
using RankedLists = std::map<std::string, std::map<std::string, std::vector<std::string>>>;

struct MatcherMetrics {
  double precision_at_1 = 0.0;
  double recall_at_k = 0.0;
  double f1 = 0.0;
  double mrr = 0.0;
};

struct MetricsReport {
  std::map<std::string, MatcherMetrics> per_matcher;
  std::size_t evaluated_sources = 0;
  std::size_t k = 10;
  std::uint64_t snapshot_seq = 0;
  bool insufficient_ground_truth = false;
  std::size_t trivial_ground_truth = 0;
  std::size_t manual_ground_truth = 0;
};

struct ConsensusEntry {
  std::vector<std::string> matchers;  // sorted
  std::size_t count = 0;
};

struct ConsensusReport {
  std::vector<ConsensusEntry> subsets;
  std::size_t k = 10;
  std::size_t accepted = 0;
  std::uint64_t snapshot_seq = 0;
};

struct RankBuckets {
  std::size_t rank_1 = 0;
  std::size_t rank_2_3 = 0;
  std::size_t rank_4_10 = 0;
  std::size_t absent = 0;  // not found, or ranked beyond 10

  std::size_t total() const { return rank_1 + rank_2_3 + rank_4_10 + absent; }
};

struct RankBreakdown {
  std::map<std::string, RankBuckets> per_matcher;
  std::size_t evaluated_sources = 0;
  std::uint64_t snapshot_seq = 0;
};

// 1-based position of `target` in list, 0 when absent.
std::size_t rank_in(const std::vector<std::string>& list, const std::string& target);

// Per matcher, over sources with an accepted target t*: MRR = mean(1/rank),
// precision@1 = share ranked first among sources the matcher predicted for,
// recall@k = share with rank <= k, F1 = harmonic mean of the two.
MetricsReport compute_metrics(const GroundTruth& gt, const RankedLists& lists, std::size_t k);

// Assigns each accepted pair to the exact set of matchers ranking it <= k.
ConsensusReport consensus_sets(const GroundTruth& gt, const RankedLists& lists, std::size_t k);

RankBreakdown rank_breakdown(const GroundTruth& gt, const RankedLists& lists);

void to_json(nlohmann::json& j, const MetricsReport& r);
void to_json(nlohmann::json& j, const ConsensusReport& r);
void to_json(nlohmann::json& j, const RankBreakdown& r);

}  // namespace matchbench

#endif  // MATCHBENCH_EVAL_HPP_
