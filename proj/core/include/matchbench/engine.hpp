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

#ifndef MATCHBENCH_ENGINE_HPP_
#define MATCHBENCH_ENGINE_HPP_

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/matchers.hpp"
#include "matchbench/pair.hpp"

namespace matchbench {

enum class MatcherKind { kBuiltin, kExternal };
enum class MatcherStatus { kReady, kRunning, kFailed };
enum class CandidateStatus { kSuggested, kAutoAccepted, kAccepted, kRejected, kFlagged };
enum class Feedback { kAccept, kReject };

std::string_view to_string(MatcherKind kind);
std::string_view to_string(MatcherStatus status);
std::string_view to_string(CandidateStatus status);
CandidateStatus candidate_status_from_string(std::string_view text);

struct MatcherSpec {
  std::string id;
  MatcherKind kind = MatcherKind::kBuiltin;
  std::vector<std::string> command;  // argv, external only
  std::size_t top_k = 10;
  MatcherStatus status = MatcherStatus::kReady;
  std::optional<std::string> failure_reason;

  static MatcherSpec builtin(std::string_view id, std::size_t top_k = 10);
  static MatcherSpec external(std::string id, std::vector<std::string> command,
                              std::size_t top_k = 10);
};

struct Candidate {
  std::string source;
  std::string target;
  std::map<std::string, double> scores;
  double aggregate = 0.0;
  CandidateStatus status = CandidateStatus::kSuggested;
  std::optional<std::string> note;

  Pair pair() const { return {source, target}; }
};

// Normalized ensemble weights plus the learning rate used by update_weights.
struct WeightVector {
  std::map<std::string, double> weights;
  double learning_rate = 0.1;

  static WeightVector uniform(const std::vector<std::string>& ids,
                              double learning_rate = 0.1);
  double weight(std::string_view id) const;
  double sum() const;
  // New matchers take an equal 1/(n+1) share; the rest are scaled down.
  void add(const std::string& id);
  void remove(std::string_view id);
  void normalize();
};

struct EngineConfig {
  double easy_threshold = 0.95;
  double display_cutoff = 0.4;
  std::size_t top_k = 10;
  std::size_t histogram_bins = 10;
  std::chrono::duration<double> plugin_timeout{300.0};

  // Throws Validation unless 0 < display_cutoff <= easy_threshold <= 1.
  void validate() const;
};

struct ScoredTarget {
  std::string target;
  double score = 0.0;

  bool operator==(const ScoredTarget&) const = default;
};

// Score descending, then target name ascending.
void sort_ranked(std::vector<ScoredTarget>& list);

// One matcher's per-source top-k list.
struct MatcherRanking {
  std::string matcher_id;
  std::size_t top_k = 10;
  std::map<std::string, std::vector<ScoredTarget>> per_source;

  // 1-based position of `target` in the list for `source`.
  std::optional<std::size_t> rank_of(std::string_view source,
                                     std::string_view target) const;
};

using Rankings = std::map<std::string, MatcherRanking, std::less<>>;

// Scores every source against every target and keeps the top_k per source.
// `progress` receives the completed fraction after each source.
MatcherRanking run_builtin_matcher(const MatchContext& ctx, std::string_view id,
                                   std::size_t top_k,
                                   const std::function<void(double)>& progress = {});

// Auto-accepts pairs whose canonical names are equal or whose edit similarity
// reaches easy_threshold, provided the pair is each side's unique best match.
std::vector<Pair> detect_easy_matches(const MatchContext& ctx, const EngineConfig& cfg);

// Candidate storage and the single merge point for matcher results.
class CandidateTable {
 public:
  CandidateTable() = default;
  explicit CandidateTable(std::vector<std::string> source_order);

  // Adds the union of the ranking's lists, records the ranking, and fills the
  // matcher's score into every candidate (builtins are scored on all pairs,
  // external matchers only where they reported). New candidates receive the
  // scores of previously merged builtins.
  void merge(const MatcherRanking& ranking, const MatchContext& ctx);
  // Removes a matcher's scores and ranking; suggested candidates no longer
  // backed by any ranking are dropped.
  void drop_matcher(std::string_view id);
  // Inserts the pair if missing, scored by every merged builtin.
  Candidate& ensure(const Pair& pair, const MatchContext& ctx);
  void recompute_aggregates(const WeightVector& weights);

  const Candidate* find(const Pair& pair) const;
  Candidate* find(const Pair& pair);
  std::size_t size() const { return candidates_.size(); }
  const std::map<Pair, Candidate>& all() const { return candidates_; }
  const Rankings& rankings() const { return rankings_; }
  const std::vector<std::string>& source_order() const { return source_order_; }

  // Sources in dataset order; within a source, aggregate descending then
  // target ascending.
  std::vector<const Candidate*> ranked() const;

  friend void to_json(nlohmann::json& j, const CandidateTable& t);
  friend void from_json(const nlohmann::json& j, CandidateTable& t);

 private:
  std::vector<std::string> source_order_;
  std::map<Pair, Candidate> candidates_;
  Rankings rankings_;
  std::vector<std::string> builtin_ids_;
};

// Multiplicative update with reciprocal-rank reward, then renormalization.
// Throws NotFound when the pair is not a candidate.
WeightVector update_weights(const WeightVector& weights, Feedback decision,
                            const Pair& pair, const CandidateTable& table);

struct GenerationResult {
  CandidateTable table;
  std::vector<MatcherSpec> matchers;
  WeightVector weights;
};

// Runs every matcher (concurrently), merges ready results, and renormalizes
// the weights over ready matchers. Failed matchers stay in `matchers` with a
// reason. Throws Engine when no matcher succeeds.
GenerationResult generate_candidates(const MatchContext& ctx,
                                     std::vector<MatcherSpec> matchers,
                                     const WeightVector& weights,
                                     const EngineConfig& cfg);

void to_json(nlohmann::json& j, const MatcherSpec& m);
void from_json(const nlohmann::json& j, MatcherSpec& m);
void to_json(nlohmann::json& j, const Candidate& c);
void from_json(const nlohmann::json& j, Candidate& c);
void to_json(nlohmann::json& j, const WeightVector& w);
void from_json(const nlohmann::json& j, WeightVector& w);
void to_json(nlohmann::json& j, const EngineConfig& c);
void from_json(const nlohmann::json& j, EngineConfig& c);
void to_json(nlohmann::json& j, const MatcherRanking& r);
void from_json(const nlohmann::json& j, MatcherRanking& r);

}  // namespace matchbench

#endif  // MATCHBENCH_ENGINE_HPP_
