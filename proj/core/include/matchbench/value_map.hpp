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

#ifndef MATCHBENCH_VALUE_MAP_HPP_
#define MATCHBENCH_VALUE_MAP_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/ingest.hpp"
#include "matchbench/pair.hpp"

namespace matchbench {

struct ValuePair {
  std::string from;
  std::string to;
  double similarity = 0.0;

  bool operator==(const ValuePair&) const = default;
};

struct AffineTransform {
  double scale = 1.0;
  double offset = 0.0;

  bool operator==(const AffineTransform&) const = default;
};

struct ValueMapping {
  std::string source_attr;
  std::string target_attr;
  std::vector<ValuePair> pairs;
  std::vector<std::string> unmapped_source;
  std::optional<AffineTransform> transform;
};

inline constexpr double kDefaultValueThreshold = 0.5;

// Greedy one-to-one proposal: every cross pair is scored by edit similarity
// of canonicalized values, sorted by (similarity desc, source asc, target
// asc), and taken when both ends are free and the score reaches `threshold`.
// Inputs are treated as sets; duplicates are ignored.
ValueMapping propose_value_mapping(std::span<const std::string> source_values,
                                   std::span<const std::string> target_values,
                                   double threshold = kDefaultValueThreshold);

// Throws Validation if a `from` or `to` value repeats.
void validate_value_mapping(const ValueMapping& mapping);

enum class Pairing { kPaired, kQuantile };

struct AffineFit {
  double scale = 1.0;
  double offset = 0.0;
  double residual = 0.0;  // RMS error of the fit
};

// Least squares target ≈ scale * source + offset. kPaired requires equal
// lengths; kQuantile sorts both samples and matches them at evenly spaced
// quantiles (linear interpolation), so lengths may differ. Throws Validation
// when fewer than two distinct source values exist.
AffineFit fit_affine_transform(std::span<const double> source,
                               std::span<const double> target,
                               Pairing pairing = Pairing::kPaired);

// Distinct non-null values (trimmed) in first-appearance order.
std::vector<std::string> unique_values(const Dataset& dataset, std::string_view attribute);

struct HarmonizeOptions {
  bool include_unmapped_columns = false;
};

// Produces a dataset laid out by `target_order` (only accepted targets appear).
// Each output cell is the mapped value when the trimmed source value has a
// pair, else the affine transform result for numeric cells when a transform
// exists, else the source cell verbatim. Throws NotFound for mappings that
// name unknown attributes.
Dataset harmonize(const Dataset& source, std::span<const std::string> target_order,
                  std::span<const Pair> accepted,
                  const std::map<Pair, ValueMapping>& value_maps,
                  const HarmonizeOptions& options = {});

std::string dataset_to_csv(const Dataset& dataset);

void to_json(nlohmann::json& j, const ValueMapping& m);
void from_json(const nlohmann::json& j, ValueMapping& m);

}  // namespace matchbench

#endif  // MATCHBENCH_VALUE_MAP_HPP_
