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

#ifndef MATCHBENCH_EXPLAINER_HPP_
#define MATCHBENCH_EXPLAINER_HPP_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/matchers.hpp"
#include "matchbench/pair.hpp"

namespace matchbench {

enum class Criterion {
  kNameSimilarity,
  kTokenPatterns,
  kSemanticMeaning,
  kValueCompatibility,
  kDistributionPatterns,
  kHistoricalMappings,
  kDomainKnowledge,
};

enum class Diagnosis { kLikelyMatch, kLikelyMismatch, kUndetermined };

std::string_view to_string(Criterion c);
std::string_view to_string(Diagnosis d);

struct CriterionResult {
  Criterion name = Criterion::kNameSimilarity;
  std::optional<double> score;  // nullopt when the criterion does not apply
  std::string evidence;
};

struct Explanation {
  std::string source;
  std::string target;
  std::vector<CriterionResult> criteria;  // always all seven, in enum order
  Diagnosis diagnosis = Diagnosis::kUndetermined;
  std::optional<std::string> narrative;
  std::vector<std::string> warnings;

  const CriterionResult& criterion(Criterion c) const;
};

// Equivalence classes over canonical attribute names. Each CSV row lists
// names that mean the same thing; rows sharing a name merge transitively.
class SynonymTable {
 public:
  static SynonymTable from_csv(std::string_view csv);

  void add_row(std::span<const std::string> names);
  bool empty() const { return parent_.empty(); }
  // True when both names (canonicalized) were listed and share a class.
  bool equivalent(std::string_view a, std::string_view b) const;

 private:
  std::string root(const std::string& name) const;

  std::map<std::string, std::string> parent_;
};

// Builds all criteria for one (source, target) pair. `history` and `synonyms`
// may be null when nothing was loaded. Throws NotFound for unknown attributes.
Explanation explain_candidate(const MatchContext& ctx, const Pair& pair,
                              const std::set<Pair>* history,
                              const SynonymTable* synonyms);

// value_compatibility == 0 vetoes to a mismatch; otherwise the mean of
// applicable scores decides (>= 0.6 match, <= 0.4 mismatch, else undetermined).
Diagnosis diagnose(std::span<const CriterionResult> criteria);

struct LlmConfig {
  std::string url;  // chat-completion endpoint, e.g. http://host:port/v1/chat/completions
  std::string model = "default";
  std::string api_key;
  double timeout_seconds = 30.0;

  bool enabled() const { return !url.empty(); }
  // MATCHBENCH_LLM_URL, MATCHBENCH_LLM_KEY, MATCHBENCH_LLM_MODEL.
  static LlmConfig from_env();
};

struct NarrativeResult {
  std::optional<std::string> text;
  std::optional<std::string> warning;
};

// Posts the explanation to the endpoint and returns choices[0].message.content.
// Disabled config yields neither text nor warning; transport or protocol
// failures yield a warning only.
NarrativeResult llm_narrative(const Explanation& explanation, const LlmConfig& config);

// Runs llm_narrative and stores its text or warning on the explanation.
void attach_narrative(Explanation& explanation, const LlmConfig& config);

void to_json(nlohmann::json& j, const Explanation& e);

}  // namespace matchbench

#endif  // MATCHBENCH_EXPLAINER_HPP_
