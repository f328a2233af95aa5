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

#ifndef MATCHBENCH_INGEST_HPP_
#define MATCHBENCH_INGEST_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace matchbench {

enum class Side { kSource, kTarget };
enum class InferredType { kNumeric, kCategorical, kBoolean, kDate, kText };
enum class CardinalityClass { kEnum, kContinuous, kBoolean, kDate, kFreeText };

std::string_view to_string(Side side);
std::string_view to_string(InferredType type);
std::string_view to_string(CardinalityClass cls);
Side side_from_string(std::string_view text);
InferredType inferred_type_from_string(std::string_view text);

struct Attribute {
  std::string name;
  std::optional<std::string> description;
  InferredType inferred_type = InferredType::kText;
  std::string group;
  std::size_t distinct_count = 0;
  double null_fraction = 0.0;
};

// One side of a task. `columns[i]` holds the raw cell text of attribute i;
// schema-only datasets have no rows.
struct Dataset {
  Side side = Side::kSource;
  std::vector<Attribute> attributes;
  std::vector<std::vector<std::string>> columns;
  std::size_t row_count = 0;

  bool schema_only() const { return row_count == 0; }
  const Attribute* find(std::string_view name) const;
  // Throws NotFound.
  std::size_t index_of(std::string_view name) const;
  std::span<const std::string> column(std::string_view name) const;
};

// Parses a data CSV (header row required). Attribute properties are left at
// their defaults until annotate_dataset() runs.
Dataset load_csv(std::string_view bytes, Side side);

// Parses a schema listing: one row per attribute with a `name` column and an
// optional `description` column. Produces a row-less Dataset.
Dataset load_schema_csv(std::string_view bytes, Side side);

// Copies descriptions from a `name,description` CSV onto matching attributes;
// rows naming unknown attributes are returned.
std::vector<std::string> apply_descriptions(Dataset& dataset,
                                            std::string_view metadata_csv);

// Empty (after trimming) or one of na, n/a, null, none in any case.
bool is_null_value(std::string_view value);

InferredType infer_type(std::span<const std::string> values);

struct ValueCount {
  std::string value;
  std::size_t count = 0;

  bool operator==(const ValueCount&) const = default;
};

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
};

inline constexpr std::size_t kTopCategories = 20;
inline constexpr std::size_t kMaxSamples = 10;

struct Profile {
  std::string attribute;
  InferredType inferred_type = InferredType::kText;
  std::size_t row_count = 0;
  std::size_t null_count = 0;
  // Non-numeric attributes: top 20 values by count (ties by value), the rest
  // summed into other_count.
  std::optional<std::vector<ValueCount>> categorical_frequencies;
  std::size_t other_count = 0;
  std::optional<Histogram> numeric_histogram;
  std::optional<double> min;
  std::optional<double> max;
  std::vector<std::string> sample_values;
};

// Equal-width histogram over [min, max] with the last bin closed; collapses to
// one bin when min == max. Empty input yields an empty histogram.
Histogram equal_width_histogram(std::span<const double> values, std::size_t bins);

// Requires inferred_type to be set (see annotate_dataset). Throws NotFound.
Profile profile_attribute(const Dataset& dataset, std::string_view name,
                          std::size_t bins = 10);

struct OntologyGroup {
  std::string label;
  std::vector<std::string> members;
};

struct AttributeProperties {
  InferredType inferred_type = InferredType::kText;
  CardinalityClass cardinality = CardinalityClass::kFreeText;
};

struct Ontology {
  std::vector<OntologyGroup> groups;
  std::map<std::string, AttributeProperties> properties;

  // Empty string when the attribute is unknown.
  std::string group_of(std::string_view attribute) const;
  bool has_group(std::string_view label) const;
};

inline constexpr std::string_view kMiscGroup = "misc";

// Groups attributes by the first token of their canonical name when at least
// two attributes share it; everything else lands in "misc".
Ontology infer_ontology(const Dataset& dataset);

// Fills inferred_type, distinct_count, null_fraction and group on every
// attribute. Idempotent.
void annotate_dataset(Dataset& dataset);

void to_json(nlohmann::json& j, const Attribute& a);
void to_json(nlohmann::json& j, const Profile& p);
void to_json(nlohmann::json& j, const Ontology& o);

}  // namespace matchbench

#endif  // MATCHBENCH_INGEST_HPP_
