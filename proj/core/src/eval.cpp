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

#include <algorithm>

#include "matchbench/error.hpp"

namespace matchbench {

void GroundTruth::validate() const {
  std::map<std::string, std::string> by_source, by_target;
  for (const auto& p : accepted) {
    if (rejected.count(p)) {
      throw Error(ErrorCode::kValidation,
                  "pair " + p.source + " -> " + p.target + " is both accepted and rejected");
    }
    if (!by_source.emplace(p.source, p.target).second) {
      throw Error(ErrorCode::kValidation, "source '" + p.source + "' has two accepted targets");
    }
    if (!by_target.emplace(p.target, p.source).second) {
      throw Error(ErrorCode::kValidation, "target '" + p.target + "' has two accepted sources");
    }
  }
}

std::size_t rank_in(const std::vector<std::string>& list, const std::string& target) {
  auto it = std::find(list.begin(), list.end(), target);
  return it == list.end() ? 0 : static_cast<std::size_t>(it - list.begin()) + 1;
}

namespace {

const std::vector<std::string>* list_for(
    const std::map<std::string, std::vector<std::string>>& per_source,
    const std::string& source) {
  auto it = per_source.find(source);
  return it == per_source.end() ? nullptr : &it->second;
}

}  // namespace

MetricsReport compute_metrics(const GroundTruth& gt, const RankedLists& lists, std::size_t k) {
  MetricsReport report;
  report.k = k;
  report.snapshot_seq = gt.snapshot_seq;
  report.evaluated_sources = gt.accepted.size();
  report.trivial_ground_truth = gt.trivial.size();
  report.manual_ground_truth = gt.accepted.size() - gt.trivial.size();
  if (gt.accepted.empty()) {
    report.insufficient_ground_truth = true;
    return report;
  }
  const double n = static_cast<double>(gt.accepted.size());
  for (const auto& [matcher, per_source] : lists) {
    double reciprocal = 0.0;
    std::size_t predicted = 0, first = 0, within_k = 0;
    for (const auto& p : gt.accepted) {
      const auto* list = list_for(per_source, p.source);
      if (!list || list->empty()) continue;
      ++predicted;
      const std::size_t rank = rank_in(*list, p.target);
      if (rank == 0) continue;
      reciprocal += 1.0 / static_cast<double>(rank);
      if (rank == 1) ++first;
      if (rank <= k) ++within_k;
    }
    MatcherMetrics m;
    m.mrr = reciprocal / n;
    m.precision_at_1 =
        predicted == 0 ? 0.0 : static_cast<double>(first) / static_cast<double>(predicted);
    m.recall_at_k = static_cast<double>(within_k) / n;
    const double denom = m.precision_at_1 + m.recall_at_k;
    m.f1 = denom > 0.0 ? 2.0 * m.precision_at_1 * m.recall_at_k / denom : 0.0;
    report.per_matcher[matcher] = m;
  }
  return report;
}

ConsensusReport consensus_sets(const GroundTruth& gt, const RankedLists& lists, std::size_t k) {
  ConsensusReport report;
  report.k = k;
  report.accepted = gt.accepted.size();
  report.snapshot_seq = gt.snapshot_seq;
  std::map<std::vector<std::string>, std::size_t> counts;
  for (const auto& p : gt.accepted) {
    std::vector<std::string> members;
    for (const auto& [matcher, per_source] : lists) {
      const auto* list = list_for(per_source, p.source);
      if (!list) continue;
      const std::size_t rank = rank_in(*list, p.target);
      if (rank != 0 && rank <= k) members.push_back(matcher);
    }
    ++counts[members];  // map iteration order keeps members sorted
  }
  for (auto& [members, count] : counts) report.subsets.push_back({members, count});
  std::stable_sort(report.subsets.begin(), report.subsets.end(),
                   [](const ConsensusEntry& a, const ConsensusEntry& b) {
                     return a.count > b.count;
                   });
  return report;
}

RankBreakdown rank_breakdown(const GroundTruth& gt, const RankedLists& lists) {
  RankBreakdown report;
  report.evaluated_sources = gt.accepted.size();
  report.snapshot_seq = gt.snapshot_seq;
  for (const auto& [matcher, per_source] : lists) {
    RankBuckets b;
    for (const auto& p : gt.accepted) {
      const auto* list = list_for(per_source, p.source);
      const std::size_t rank = list ? rank_in(*list, p.target) : 0;
      if (rank == 1) {
        ++b.rank_1;
      } else if (rank >= 2 && rank <= 3) {
        ++b.rank_2_3;
      } else if (rank >= 4 && rank <= 10) {
        ++b.rank_4_10;
      } else {
        ++b.absent;
      }
    }
    report.per_matcher[matcher] = b;
  }
  return report;
}

void to_json(nlohmann::json& j, const MetricsReport& r) {
  auto per = nlohmann::json::object();
  for (const auto& [id, m] : r.per_matcher) {
    per[id] = {{"precision_at_1", m.precision_at_1},
               {"recall_at_k", m.recall_at_k},
               {"f1", m.f1},
               {"mrr", m.mrr}};
  }
  j = nlohmann::json{{"matchers", std::move(per)},
                     {"evaluated_sources", r.evaluated_sources},
                     {"k", r.k},
                     {"snapshot_seq", r.snapshot_seq},
                     {"insufficient_ground_truth", r.insufficient_ground_truth},
                     {"ground_truth", {{"trivial", r.trivial_ground_truth},
                                       {"manual", r.manual_ground_truth}}}};
}

void to_json(nlohmann::json& j, const ConsensusReport& r) {
  auto subsets = nlohmann::json::array();
  for (const auto& e : r.subsets) subsets.push_back({{"matchers", e.matchers}, {"count", e.count}});
  j = nlohmann::json{{"subsets", std::move(subsets)},
                     {"k", r.k},
                     {"accepted", r.accepted},
                     {"snapshot_seq", r.snapshot_seq}};
}

void to_json(nlohmann::json& j, const RankBreakdown& r) {
  auto per = nlohmann::json::object();
  for (const auto& [id, b] : r.per_matcher) {
    per[id] = {{"1", b.rank_1}, {"2-3", b.rank_2_3}, {"4-10", b.rank_4_10}, {"absent", b.absent}};
  }
  j = nlohmann::json{{"matchers", std::move(per)},
                     {"evaluated_sources", r.evaluated_sources},
                     {"snapshot_seq", r.snapshot_seq}};
}

}  // namespace matchbench
