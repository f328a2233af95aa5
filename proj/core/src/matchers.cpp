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

#include "matchbench/matchers.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "matchbench/error.hpp"

namespace matchbench {

bool is_builtin_matcher(std::string_view id) {
  return std::find(kBuiltinMatchers.begin(), kBuiltinMatchers.end(), id) !=
         kBuiltinMatchers.end();
}

std::string canonical_cell(std::string_view value, InferredType type) {
  std::string v = canonicalize_value(value);
  if (type == InferredType::kBoolean) {
    if (v == "yes" || v == "true" || v == "1") return "true";
    if (v == "no" || v == "false" || v == "0") return "false";
  }
  return v;
}

MatchContext::MatchContext(const Dataset& source, const Dataset& target) {
  sources_.reserve(source.attributes.size());
  for (std::size_t i = 0; i < source.attributes.size(); ++i) {
    sources_.push_back(build(source, i));
    source_index_.emplace(sources_.back().name, i);
  }
  targets_.reserve(target.attributes.size());
  for (std::size_t i = 0; i < target.attributes.size(); ++i) {
    targets_.push_back(build(target, i));
    target_index_.emplace(targets_.back().name, i);
  }
}

AttributeFeatures MatchContext::build(const Dataset& ds, std::size_t column) {
  const Attribute& attr = ds.attributes[column];
  AttributeFeatures f;
  f.name = attr.name;
  f.side = ds.side;
  f.type = attr.inferred_type;
  f.description = attr.description;
  f.canonical = canonicalize_name(attr.name);
  f.trigrams = char_trigrams(f.canonical.canonical);

  std::unordered_map<std::string, std::size_t> counts;
  std::unordered_set<std::string> seen_samples;
  for (const auto& cell : ds.columns[column]) {
    if (is_null_value(cell)) continue;
    ++f.non_null;
    ++counts[canonical_cell(cell, f.type)];
    if (f.samples.size() < kMaxSamples) {
      auto t = trim(cell);
      if (seen_samples.insert(t).second) f.samples.push_back(std::move(t));
    }
    if (f.type == InferredType::kNumeric) {
      if (auto d = parse_number(cell)) f.numbers.push_back(*d);
    }
  }
  std::sort(f.numbers.begin(), f.numbers.end());

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > kValueSetCap) ranked.resize(kValueSetCap);
  f.value_ids.reserve(ranked.size());
  for (const auto& [value, count] : ranked) {
    auto it = interned_.find(value);
    if (it == interned_.end()) {
      it = interned_.emplace(value, static_cast<std::uint32_t>(interned_.size())).first;
    }
    f.value_ids.push_back(it->second);
  }
  std::sort(f.value_ids.begin(), f.value_ids.end());
  return f;
}

const AttributeFeatures* MatchContext::find_source(std::string_view name) const {
  auto it = source_index_.find(name);
  return it == source_index_.end() ? nullptr : &sources_[it->second];
}

const AttributeFeatures* MatchContext::find_target(std::string_view name) const {
  auto it = target_index_.find(name);
  return it == target_index_.end() ? nullptr : &targets_[it->second];
}

const AttributeFeatures& MatchContext::source(std::string_view name) const {
  if (const auto* f = find_source(name)) return *f;
  throw Error(ErrorCode::kNotFound, "unknown source attribute '" + std::string(name) + "'");
}

const AttributeFeatures& MatchContext::target(std::string_view name) const {
  if (const auto* f = find_target(name)) return *f;
  throw Error(ErrorCode::kNotFound, "unknown target attribute '" + std::string(name) + "'");
}

double distribution_similarity(const std::vector<double>& a,
                               const std::vector<double>& b, std::size_t bins) {
  if (a.empty() || b.empty()) return 0.0;
  // Inputs are sorted; bucket by counting values below each edge.
  const double lo = std::min(a.front(), b.front());
  const double hi = std::max(a.back(), b.back());
  if (lo == hi) return 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);

  auto shares = [&](const std::vector<double>& xs) {
    std::vector<double> out(bins, 0.0);
    std::size_t below = 0;
    for (std::size_t i = 1; i <= bins; ++i) {
      std::size_t upto = xs.size();
      if (i < bins) {
        const double edge = lo + width * static_cast<double>(i);
        upto = static_cast<std::size_t>(
            std::lower_bound(xs.begin(), xs.end(), edge) - xs.begin());
      }
      out[i - 1] = static_cast<double>(upto - below) / static_cast<double>(xs.size());
      below = upto;
    }
    return out;
  };
  const auto pa = shares(a);
  const auto pb = shares(b);
  double tv = 0.0;
  for (std::size_t i = 0; i < bins; ++i) tv += std::abs(pa[i] - pb[i]);
  return std::clamp(1.0 - 0.5 * tv, 0.0, 1.0);
}

double score_pair(std::string_view matcher_id, const AttributeFeatures& source,
                  const AttributeFeatures& target) {
  if (matcher_id == kNameEdit) {
    return edit_similarity(source.canonical.canonical, target.canonical.canonical);
  }
  if (matcher_id == kNameTokenJaccard) {
    return token_jaccard(source.canonical.tokens, target.canonical.tokens);
  }
  if (matcher_id == kNameTrigram) {
    return sorted_jaccard(source.trigrams, target.trigrams);
  }
  if (matcher_id == kValueOverlap) {
    return sorted_jaccard(source.value_ids, target.value_ids);
  }
  if (matcher_id == kDistribution) {
    if (source.type != target.type || !source.has_values() || !target.has_values()) {
      return 0.0;
    }
    if (source.type == InferredType::kNumeric) {
      return distribution_similarity(source.numbers, target.numbers);
    }
    return sorted_jaccard(source.value_ids, target.value_ids);
  }
  throw Error(ErrorCode::kNotFound, "unknown matcher '" + std::string(matcher_id) + "'");
}

}  // namespace matchbench
