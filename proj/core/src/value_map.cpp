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

#include "matchbench/value_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "matchbench/csv.hpp"
#include "matchbench/error.hpp"
#include "matchbench/text.hpp"

namespace matchbench {
namespace {

std::vector<std::string> distinct_sorted(std::span<const std::string> values) {
  std::vector<std::string> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ValueMapping propose_value_mapping(std::span<const std::string> source_values,
                                   std::span<const std::string> target_values,
                                   double threshold) {
  const auto src = distinct_sorted(source_values);
  const auto tgt = distinct_sorted(target_values);
  std::vector<std::string> src_canon, tgt_canon;
  for (const auto& v : src) src_canon.push_back(canonicalize_value(v));
  for (const auto& v : tgt) tgt_canon.push_back(canonicalize_value(v));

  struct Scored {
    double similarity;
    std::size_t s;
    std::size_t t;
  };
  std::vector<Scored> all;
  all.reserve(src.size() * tgt.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      const double sim = edit_similarity(src_canon[i], tgt_canon[j]);
      if (sim >= threshold) all.push_back({sim, i, j});
    }
  }
  // src/tgt are sorted, so index order is value order.
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.s != b.s) return a.s < b.s;
    return a.t < b.t;
  });

  ValueMapping m;
  std::vector<bool> src_used(src.size(), false), tgt_used(tgt.size(), false);
  for (const auto& e : all) {
    if (src_used[e.s] || tgt_used[e.t]) continue;
    src_used[e.s] = tgt_used[e.t] = true;
    m.pairs.push_back({src[e.s], tgt[e.t], e.similarity});
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!src_used[i]) m.unmapped_source.push_back(src[i]);
  }
  return m;
}

void validate_value_mapping(const ValueMapping& mapping) {
  std::set<std::string> from, to;
  for (const auto& p : mapping.pairs) {
    if (!from.insert(p.from).second) {
      throw Error(ErrorCode::kValidation, "source value '" + p.from + "' mapped twice");
    }
    if (!to.insert(p.to).second) {
      throw Error(ErrorCode::kValidation, "target value '" + p.to + "' used twice");
    }
  }
  if (mapping.transform &&
      !(std::isfinite(mapping.transform->scale) && std::isfinite(mapping.transform->offset))) {
    throw Error(ErrorCode::kValidation, "transform must be finite");
  }
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace

AffineFit fit_affine_transform(std::span<const double> source,
                               std::span<const double> target, Pairing pairing) {
  std::vector<double> xs, ys;
  if (pairing == Pairing::kPaired) {
    if (source.size() != target.size()) {
      throw Error(ErrorCode::kValidation, "paired fit needs equal-length samples");
    }
    xs.assign(source.begin(), source.end());
    ys.assign(target.begin(), target.end());
  } else {
    std::vector<double> s(source.begin(), source.end());
    std::vector<double> t(target.begin(), target.end());
    if (s.empty() || t.empty()) throw Error(ErrorCode::kValidation, "empty sample");
    std::sort(s.begin(), s.end());
    std::sort(t.begin(), t.end());
    const std::size_t n = std::min(s.size(), t.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double q = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      xs.push_back(quantile(s, q));
      ys.push_back(quantile(t, q));
    }
  }
  std::set<double> distinct(xs.begin(), xs.end());
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kValidation, "no fit: source values are constant");
  }

  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  AffineFit fit;
  fit.scale = sxy / sxx;
  fit.offset = my - fit.scale * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.scale * xs[i] + fit.offset);
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / n);
  return fit;
}

std::vector<std::string> unique_values(const Dataset& dataset, std::string_view attribute) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& cell : dataset.column(attribute)) {
    if (is_null_value(cell)) continue;
    auto v = trim(cell);
    if (seen.insert(v).second) out.push_back(std::move(v));
  }
  return out;
}

Dataset harmonize(const Dataset& source, std::span<const std::string> target_order,
                  std::span<const Pair> accepted,
                  const std::map<Pair, ValueMapping>& value_maps,
                  const HarmonizeOptions& options) {
  std::map<std::string, std::string> by_target;
  for (const auto& p : accepted) {
    source.index_of(p.source);
    if (std::find(target_order.begin(), target_order.end(), p.target) == target_order.end()) {
      throw Error(ErrorCode::kNotFound, "unknown target attribute '" + p.target + "'");
    }
    by_target[p.target] = p.source;
  }
  for (const auto& [pair, _] : value_maps) {
    if (!source.find(pair.source)) {
      throw Error(ErrorCode::kNotFound, "value map names unknown attribute '" + pair.source + "'");
    }
  }

  Dataset out;
  out.side = Side::kTarget;
  out.row_count = source.row_count;
  std::set<std::string> used_sources;
  for (const auto& target : target_order) {
    auto hit = by_target.find(target);
    if (hit == by_target.end()) continue;
    const std::string& src_name = hit->second;
    used_sources.insert(src_name);
    const auto column = source.column(src_name);

    std::unordered_map<std::string, std::string> rewrite;
    std::optional<AffineTransform> transform;
    auto vm = value_maps.find({src_name, target});
    if (vm != value_maps.end()) {
      for (const auto& p : vm->second.pairs) rewrite.emplace(p.from, p.to);
      transform = vm->second.transform;
    }

    std::vector<std::string> cells;
    cells.reserve(column.size());
    for (const auto& cell : column) {
      if (!rewrite.empty() && !is_null_value(cell)) {
        auto r = rewrite.find(trim(cell));
        if (r != rewrite.end()) {
          cells.push_back(r->second);
          continue;
        }
      }
      if (transform && !is_null_value(cell)) {
        if (auto x = parse_number(cell)) {
          cells.push_back(format_number(transform->scale * *x + transform->offset));
          continue;
        }
      }
      cells.push_back(cell);
    }
    Attribute a;
    a.name = target;
    out.attributes.push_back(std::move(a));
    out.columns.push_back(std::move(cells));
  }

  if (options.include_unmapped_columns) {
    std::set<std::string> taken;
    for (const auto& a : out.attributes) taken.insert(a.name);
    for (std::size_t i = 0; i < source.attributes.size(); ++i) {
      const auto& name = source.attributes[i].name;
      if (used_sources.count(name)) continue;
      Attribute a;
      a.name = taken.count(name) ? "source:" + name : name;
      taken.insert(a.name);
      out.attributes.push_back(std::move(a));
      out.columns.push_back(source.columns[i]);
    }
  }
  return out;
}

std::string dataset_to_csv(const Dataset& dataset) {
  std::string out;
  std::vector<std::string> row;
  for (const auto& a : dataset.attributes) row.push_back(a.name);
  append_csv_row(out, row);
  for (std::size_t r = 0; r < dataset.row_count; ++r) {
    row.clear();
    for (const auto& col : dataset.columns) row.push_back(col[r]);
    append_csv_row(out, row);
  }
  return out;
}

void to_json(nlohmann::json& j, const ValueMapping& m) {
  auto pairs = nlohmann::json::array();
  for (const auto& p : m.pairs) {
    pairs.push_back({{"from", p.from}, {"to", p.to}, {"similarity", p.similarity}});
  }
  j = nlohmann::json{{"source", m.source_attr},
                     {"target", m.target_attr},
                     {"pairs", std::move(pairs)},
                     {"unmapped_source", m.unmapped_source}};
  if (m.transform) {
    j["transform"] = {{"scale", m.transform->scale}, {"offset", m.transform->offset}};
  }
}

void from_json(const nlohmann::json& j, ValueMapping& m) {
  m.source_attr = j.value("source", std::string());
  m.target_attr = j.value("target", std::string());
  m.pairs.clear();
  for (const auto& p : j.value("pairs", nlohmann::json::array())) {
    m.pairs.push_back({p.at("from").get<std::string>(), p.at("to").get<std::string>(),
                       p.value("similarity", 0.0)});
  }
  m.unmapped_source = j.value("unmapped_source", std::vector<std::string>{});
  m.transform.reset();
  if (j.contains("transform") && !j["transform"].is_null()) {
    m.transform = AffineTransform{j["transform"].at("scale").get<double>(),
                                  j["transform"].at("offset").get<double>()};
  }
}

}  // namespace matchbench
