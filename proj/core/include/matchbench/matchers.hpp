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

#ifndef MATCHBENCH_MATCHERS_HPP_
#define MATCHBENCH_MATCHERS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matchbench/ingest.hpp"
#include "matchbench/text.hpp"

namespace matchbench {

inline constexpr std::string_view kNameEdit = "name_edit";
inline constexpr std::string_view kNameTokenJaccard = "name_token_jaccard";
inline constexpr std::string_view kNameTrigram = "name_trigram";
inline constexpr std::string_view kValueOverlap = "value_overlap";
inline constexpr std::string_view kDistribution = "distribution";

inline constexpr std::array<std::string_view, 5> kBuiltinMatchers = {
    kNameEdit, kNameTokenJaccard, kNameTrigram, kValueOverlap, kDistribution};

inline constexpr std::size_t kValueSetCap = 1000;
inline constexpr std::size_t kDistributionBins = 10;

bool is_builtin_matcher(std::string_view id);

// Everything a builtin matcher reads about one attribute, precomputed once per
// task. Value ids are interned per MatchContext, so features from different
// contexts must not be compared.
struct AttributeFeatures {
  std::string name;
  Side side = Side::kSource;
  InferredType type = InferredType::kText;
  std::optional<std::string> description;
  CanonicalName canonical;
  std::vector<std::string> trigrams;
  // Sorted ids of the (up to 1000) most frequent canonical values.
  std::vector<std::uint32_t> value_ids;
  // Sorted parseable numbers (numeric attributes only).
  std::vector<double> numbers;
  std::vector<std::string> samples;
  std::size_t non_null = 0;

  bool has_values() const { return non_null > 0; }
};

class MatchContext {
 public:
  // Datasets should already be annotated (types inferred).
  MatchContext(const Dataset& source, const Dataset& target);

  const std::vector<AttributeFeatures>& sources() const { return sources_; }
  const std::vector<AttributeFeatures>& targets() const { return targets_; }
  // Throws NotFound.
  const AttributeFeatures& source(std::string_view name) const;
  const AttributeFeatures& target(std::string_view name) const;
  const AttributeFeatures* find_source(std::string_view name) const;
  const AttributeFeatures* find_target(std::string_view name) const;

 private:
  AttributeFeatures build(const Dataset& ds, std::size_t column);

  std::map<std::string, std::uint32_t, std::less<>> interned_;
  std::vector<AttributeFeatures> sources_;
  std::vector<AttributeFeatures> targets_;
  std::map<std::string, std::size_t, std::less<>> source_index_;
  std::map<std::string, std::size_t, std::less<>> target_index_;
};

// Boolean spellings collapse to "true"/"false" so yes/no and 1/0 encodings
// compare equal; other values pass through canonicalize_value.
std::string canonical_cell(std::string_view value, InferredType type);

// Score in [0,1] for one builtin matcher. Throws NotFound for unknown ids.
double score_pair(std::string_view matcher_id, const AttributeFeatures& source,
                  const AttributeFeatures& target);

// 1 - total variation distance after re-binning both samples into `bins`
// equal-width bins over their union range.
double distribution_similarity(const std::vector<double>& a,
                               const std::vector<double>& b,
                               std::size_t bins = kDistributionBins);

}  // namespace matchbench

#endif  // MATCHBENCH_MATCHERS_HPP_
