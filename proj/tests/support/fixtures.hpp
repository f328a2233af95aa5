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

#ifndef MATCHBENCH_TESTS_FIXTURES_HPP_
#define MATCHBENCH_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "matchbench/eval.hpp"
#include "matchbench/pair.hpp"

namespace matchbench::fixtures {

struct TaskFixture {
  std::string source_csv;
  std::string target_csv;
  std::vector<Pair> truth;  // intended correspondences
  std::string ground_truth_csv() const;  // source,target,label
};

// 179 x 736 style task: mixed numeric / categorical / text columns with
// compound names drawn from a clinical vocabulary.
TaskFixture scale_task(std::size_t sources, std::size_t targets, std::size_t rows,
                       std::uint64_t seed = 7);

// `pairs` lexically aligned source/target names (one-character typo, different
// separator) plus `distractors` extra targets. No pair is an easy match.
TaskFixture aligned_task(std::size_t pairs = 50, std::size_t distractors = 20,
                         std::uint64_t seed = 11);

// `identical` names equal after canonicalization (snake vs camel case) and
// `disjoint` pairs of unrelated random names.
TaskFixture easy_match_task(std::size_t identical = 30, std::size_t disjoint = 30,
                            std::uint64_t seed = 13);

// Random ranked lists and ground truth for metric oracles.
struct MetricInstance {
  GroundTruth gt;
  RankedLists lists;
  std::size_t k = 10;
};

MetricInstance random_metric_instance(std::uint64_t seed, std::size_t max_sources = 20,
                                      std::size_t max_matchers = 10);

}  // namespace matchbench::fixtures

#endif  // MATCHBENCH_TESTS_FIXTURES_HPP_
