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

#include "matchbench/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "matchbench/csv.hpp"
#include "matchbench/error.hpp"
#include "matchbench/text.hpp"

namespace matchbench {

std::string_view to_string(Side side) {
  return side == Side::kSource ? "source" : "target";
}

std::string_view to_string(InferredType type) {
  switch (type) {
    case InferredType::kNumeric: return "numeric";
    case InferredType::kCategorical: return "categorical";
    case InferredType::kBoolean: return "boolean";
    case InferredType::kDate: return "date";
    case InferredType::kText: return "text";
  }
  return "text";
}

std::string_view to_string(CardinalityClass cls) {
  switch (cls) {
    case CardinalityClass::kEnum: return "enum";
    case CardinalityClass::kContinuous: return "continuous";
    case CardinalityClass::kBoolean: return "boolean";
    case CardinalityClass::kDate: return "date";
    case CardinalityClass::kFreeText: return "free-text";
  }
  return "free-text";
}

Side side_from_string(std::string_view text) {
  if (text == "source") return Side::kSource;
  if (text == "target") return Side::kTarget;
  throw Error(ErrorCode::kValidation, "unknown side '" + std::string(text) + "'");
}

InferredType inferred_type_from_string(std::string_view text) {
  for (auto t : {InferredType::kNumeric, InferredType::kCategorical,
                 InferredType::kBoolean, InferredType::kDate, InferredType::kText}) {
    if (to_string(t) == text) return t;
  }
  throw Error(ErrorCode::kValidation, "unknown type '" + std::string(text) + "'");
}

const Attribute* Dataset::find(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

std::size_t Dataset::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == name) return i;
  }
  throw Error(ErrorCode::kNotFound, "unknown " + std::string(to_string(side)) +
                                        " attribute '" + std::string(name) + "'");
}

std::span<const std::string> Dataset::column(std::string_view name) const {
  return columns[index_of(name)];
}

namespace {

std::vector<std::string> checked_header(const CsvRow& raw) {
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string name = trim(raw[i]);
    if (name.empty()) {
      throw Error(ErrorCode::kValidation,
                  "header column " + std::to_string(i + 1) + " is empty");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kValidation, "duplicate header '" + name + "'");
    }
    names.push_back(std::move(name));
  }
  return names;
}

}  // namespace

Dataset load_csv(std::string_view bytes, Side side) {
  auto rows = parse_csv(bytes);
  if (rows.empty()) throw Error(ErrorCode::kValidation, "empty file");
  const auto names = checked_header(rows.front());

  Dataset ds;
  ds.side = side;
  ds.row_count = rows.size() - 1;
  ds.attributes.resize(names.size());
  ds.columns.resize(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    ds.attributes[c].name = names[c];
    ds.columns[c].reserve(ds.row_count);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      ds.columns[c].push_back(std::move(rows[r][c]));
    }
  }
  return ds;
}

Dataset load_schema_csv(std::string_view bytes, Side side) {
  auto rows = parse_csv(bytes);
  if (rows.empty()) throw Error(ErrorCode::kValidation, "empty file");
  std::optional<std::size_t> name_col;
  std::optional<std::size_t> desc_col;
  for (std::size_t i = 0; i < rows.front().size(); ++i) {
    const auto h = to_lower(trim(rows.front()[i]));
    if (h == "name") name_col = i;
    if (h == "description") desc_col = i;
  }
  if (!name_col) {
    throw Error(ErrorCode::kValidation, "schema CSV needs a 'name' column");
  }

  Dataset ds;
  ds.side = side;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    Attribute a;
    a.name = trim(rows[r][*name_col]);
    if (a.name.empty()) {
      throw Error(ErrorCode::kValidation,
                  "schema row " + std::to_string(r + 1) + " has an empty name");
    }
    if (!seen.insert(a.name).second) {
      throw Error(ErrorCode::kValidation, "duplicate attribute '" + a.name + "'");
    }
    if (desc_col) {
      auto d = trim(rows[r][*desc_col]);
      if (!d.empty()) a.description = std::move(d);
    }
    ds.attributes.push_back(std::move(a));
    ds.columns.emplace_back();
  }
  if (ds.attributes.empty()) {
    throw Error(ErrorCode::kValidation, "schema CSV lists no attributes");
  }
  return ds;
}

std::vector<std::string> apply_descriptions(Dataset& dataset,
                                            std::string_view metadata_csv) {
  const Dataset meta = load_schema_csv(metadata_csv, dataset.side);
  std::vector<std::string> unknown;
  for (const auto& m : meta.attributes) {
    auto it = std::find_if(dataset.attributes.begin(), dataset.attributes.end(),
                           [&](const Attribute& a) { return a.name == m.name; });
    if (it == dataset.attributes.end()) {
      unknown.push_back(m.name);
    } else if (m.description) {
      it->description = m.description;
    }
  }
  return unknown;
}

bool is_null_value(std::string_view value) {
  const auto v = to_lower(trim(value));
  return v.empty() || v == "na" || v == "n/a" || v == "null" || v == "none";
}

InferredType infer_type(std::span<const std::string> values) {
  std::vector<std::string> present;
  present.reserve(values.size());
  for (const auto& v : values) {
    if (!is_null_value(v)) present.push_back(trim(v));
  }
  if (present.empty()) return InferredType::kText;
  const double n = static_cast<double>(present.size());

  std::set<std::string> canon;
  for (const auto& v : present) {
    canon.insert(to_lower(v));
    if (canon.size() > 2) break;
  }
  static const std::set<std::string> kBoolVocab = {"yes", "no",  "true",
                                                   "false", "0", "1"};
  if (canon.size() <= 2 &&
      std::all_of(canon.begin(), canon.end(),
                  [](const std::string& v) { return kBoolVocab.count(v) > 0; })) {
    return InferredType::kBoolean;
  }

  const auto numeric = std::count_if(present.begin(), present.end(), [](auto& v) {
    return parse_number(v).has_value();
  });
  if (static_cast<double>(numeric) >= 0.95 * n) return InferredType::kNumeric;

  const auto dates = std::count_if(present.begin(), present.end(),
                                   [](auto& v) { return is_iso_date(v); });
  if (static_cast<double>(dates) >= 0.95 * n) return InferredType::kDate;

  std::unordered_set<std::string> distinct(present.begin(), present.end());
  if (static_cast<double>(distinct.size()) <= std::max(20.0, 0.05 * n)) {
    return InferredType::kCategorical;
  }
  return InferredType::kText;
}

Histogram equal_width_histogram(std::span<const double> values, std::size_t bins) {
  Histogram h;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi || bins <= 1) {
    h.bin_edges = {lo, hi};
    h.counts = {values.size()};
    return h;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i < bins; ++i) {
    h.bin_edges[i] = lo + width * static_cast<double>(i);
  }
  h.bin_edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (const double v : values) {
    auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), v);
    auto idx = static_cast<std::size_t>(std::distance(h.bin_edges.begin(), it));
    idx = idx == 0 ? 0 : idx - 1;
    ++h.counts[std::min(idx, bins - 1)];
  }
  return h;
}

Profile profile_attribute(const Dataset& dataset, std::string_view name,
                          std::size_t bins) {
  const std::size_t idx = dataset.index_of(name);
  const Attribute& attr = dataset.attributes[idx];
  const auto& column = dataset.columns[idx];

  Profile p;
  p.attribute = attr.name;
  p.inferred_type = attr.inferred_type;
  p.row_count = dataset.row_count;

  std::vector<std::string> present;
  present.reserve(column.size());
  for (const auto& v : column) {
    if (is_null_value(v)) {
      ++p.null_count;
    } else {
      present.push_back(trim(v));
    }
  }

  std::unordered_set<std::string_view> sampled;
  for (const auto& v : present) {
    if (p.sample_values.size() == kMaxSamples) break;
    if (sampled.insert(v).second) p.sample_values.push_back(v);
  }

  if (attr.inferred_type == InferredType::kNumeric) {
    std::vector<double> numbers;
    numbers.reserve(present.size());
    for (const auto& v : present) {
      if (auto d = parse_number(v)) numbers.push_back(*d);
    }
    p.numeric_histogram = equal_width_histogram(numbers, bins);
    if (!numbers.empty()) {
      const auto [lo, hi] = std::minmax_element(numbers.begin(), numbers.end());
      p.min = *lo;
      p.max = *hi;
    }
    return p;
  }

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& v : present) ++counts[v];
  std::vector<ValueCount> freq;
  freq.reserve(counts.size());
  for (auto& [value, count] : counts) freq.push_back({value, count});
  std::sort(freq.begin(), freq.end(), [](const ValueCount& a, const ValueCount& b) {
    return a.count != b.count ? a.count > b.count : a.value < b.value;
  });
  if (freq.size() > kTopCategories) {
    for (std::size_t i = kTopCategories; i < freq.size(); ++i) {
      p.other_count += freq[i].count;
    }
    freq.resize(kTopCategories);
  }
  p.categorical_frequencies = std::move(freq);
  return p;
}

std::string Ontology::group_of(std::string_view attribute) const {
  for (const auto& g : groups) {
    if (std::find(g.members.begin(), g.members.end(), attribute) != g.members.end()) {
      return g.label;
    }
  }
  return {};
}

bool Ontology::has_group(std::string_view label) const {
  return std::any_of(groups.begin(), groups.end(),
                     [&](const OntologyGroup& g) { return g.label == label; });
}

namespace {

CardinalityClass cardinality_for(InferredType type) {
  switch (type) {
    case InferredType::kNumeric: return CardinalityClass::kContinuous;
    case InferredType::kCategorical: return CardinalityClass::kEnum;
    case InferredType::kBoolean: return CardinalityClass::kBoolean;
    case InferredType::kDate: return CardinalityClass::kDate;
    case InferredType::kText: return CardinalityClass::kFreeText;
  }
  return CardinalityClass::kFreeText;
}

}  // namespace

Ontology infer_ontology(const Dataset& dataset) {
  std::vector<std::string> first_tokens;
  std::map<std::string, std::size_t> token_counts;
  for (const auto& a : dataset.attributes) {
    auto cn = canonicalize_name(a.name);
    first_tokens.push_back(cn.tokens.empty() ? std::string() : cn.tokens.front());
    if (!first_tokens.back().empty()) ++token_counts[first_tokens.back()];
  }

  std::map<std::string, std::vector<std::string>> named;
  std::vector<std::string> misc;
  Ontology ontology;
  for (std::size_t i = 0; i < dataset.attributes.size(); ++i) {
    const auto& a = dataset.attributes[i];
    const auto& tok = first_tokens[i];
    if (!tok.empty() && tok != kMiscGroup && token_counts[tok] >= 2) {
      named[tok].push_back(a.name);
    } else {
      misc.push_back(a.name);
    }
    ontology.properties[a.name] = {a.inferred_type, cardinality_for(a.inferred_type)};
  }
  for (auto& [label, members] : named) {
    ontology.groups.push_back({label, std::move(members)});
  }
  if (!misc.empty()) ontology.groups.push_back({std::string(kMiscGroup), std::move(misc)});
  return ontology;
}

void annotate_dataset(Dataset& dataset) {
  for (std::size_t i = 0; i < dataset.attributes.size(); ++i) {
    auto& attr = dataset.attributes[i];
    const auto& column = dataset.columns[i];
    attr.inferred_type = infer_type(column);
    std::unordered_set<std::string> distinct;
    std::size_t nulls = 0;
    for (const auto& v : column) {
      if (is_null_value(v)) {
        ++nulls;
      } else {
        distinct.insert(trim(v));
      }
    }
    attr.distinct_count = distinct.size();
    attr.null_fraction = dataset.row_count == 0
                             ? 0.0
                             : static_cast<double>(nulls) /
                                   static_cast<double>(dataset.row_count);
  }
  const Ontology ontology = infer_ontology(dataset);
  for (auto& attr : dataset.attributes) attr.group = ontology.group_of(attr.name);
}

void to_json(nlohmann::json& j, const Attribute& a) {
  j = nlohmann::json{{"name", a.name},
                     {"inferred_type", to_string(a.inferred_type)},
                     {"group", a.group},
                     {"distinct_count", a.distinct_count},
                     {"null_fraction", a.null_fraction}};
  if (a.description) j["description"] = *a.description;
}

void to_json(nlohmann::json& j, const Profile& p) {
  j = nlohmann::json{{"attribute", p.attribute},
                     {"inferred_type", to_string(p.inferred_type)},
                     {"row_count", p.row_count},
                     {"null_count", p.null_count},
                     {"sample_values", p.sample_values}};
  if (p.categorical_frequencies) {
    auto freq = nlohmann::json::array();
    for (const auto& f : *p.categorical_frequencies) {
      freq.push_back({{"value", f.value}, {"count", f.count}});
    }
    j["categorical_frequencies"] = std::move(freq);
    j["other_count"] = p.other_count;
  }
  if (p.numeric_histogram) {
    j["numeric_histogram"] = {{"bin_edges", p.numeric_histogram->bin_edges},
                              {"counts", p.numeric_histogram->counts}};
  }
  if (p.min) j["min"] = *p.min;
  if (p.max) j["max"] = *p.max;
}

void to_json(nlohmann::json& j, const Ontology& o) {
  auto groups = nlohmann::json::array();
  for (const auto& g : o.groups) {
    groups.push_back({{"label", g.label}, {"members", g.members}});
  }
  auto props = nlohmann::json::object();
  for (const auto& [name, p] : o.properties) {
    props[name] = {{"inferred_type", to_string(p.inferred_type)},
                   {"cardinality", to_string(p.cardinality)}};
  }
  j = nlohmann::json{{"groups", std::move(groups)}, {"properties", std::move(props)}};
}

}  // namespace matchbench
