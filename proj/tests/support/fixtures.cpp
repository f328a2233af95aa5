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

#include "fixtures.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "matchbench/csv.hpp"

namespace matchbench::fixtures {

namespace {

const std::vector<std::string> kWords = {
    "tumor",   "stage",    "grade",   "patient", "age",      "weight",  "height",
    "smoking", "history",  "alcohol", "marital", "status",   "race",    "ethnicity",
    "gender",  "diagnosis", "therapy", "dose",    "radiation", "surgery", "margin",
    "lymph",   "node",     "count",   "vital",   "days",     "followup", "recurrence",
    "site",    "origin",   "biopsy",  "method",  "specimen", "volume",  "pressure",
    "glucose", "hemoglobin", "platelet", "sodium", "calcium",  "mass",    "index",
    "score",   "response", "protein", "marker",  "region",   "family",  "income",
    "education"};

std::string random_word(std::mt19937_64& rng, std::size_t len) {
  static constexpr char kLetters[] = "bcdfghjklmnpqrstvwxz";
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w.push_back(kLetters[rng() % 20]);
  return w;
}

std::string camel(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string w = words[i];
    if (i > 0 && !w.empty()) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    out += w;
  }
  return out;
}

std::string snake(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += '_';
    out += w;
  }
  return out;
}

// Column of `rows` values; kind 0 numeric, 1 categorical, 2 text.
std::vector<std::string> column(std::mt19937_64& rng, int kind, std::size_t rows) {
  std::vector<std::string> out;
  std::uniform_real_distribution<double> num(0.0, 100.0);
  static const std::vector<std::string> cats = {"yes", "no", "unknown", "low", "medium",
                                                "high", "stage i", "stage ii", "stage iii"};
  const std::size_t offset = rng() % 4;
  for (std::size_t r = 0; r < rows; ++r) {
    switch (kind) {
      case 0: out.push_back(std::to_string(static_cast<int>(num(rng)))); break;
      case 1: out.push_back(cats[(offset + rng() % 4) % cats.size()]); break;
      default: out.push_back(random_word(rng, 6) + " " + random_word(rng, 5)); break;
    }
  }
  return out;
}

std::string table_csv(const std::vector<std::string>& names,
                      const std::vector<std::vector<std::string>>& cols, std::size_t rows) {
  std::string out;
  append_csv_row(out, names);
  std::vector<std::string> row(names.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) row[c] = cols[c][r];
    append_csv_row(out, row);
  }
  return out;
}

// Distinct multi-word names from the vocabulary.
std::vector<std::vector<std::string>> distinct_names(std::mt19937_64& rng, std::size_t n,
                                                     std::size_t words) {
  std::set<std::vector<std::string>> seen;
  std::vector<std::vector<std::string>> out;
  while (out.size() < n) {
    std::vector<std::string> name;
    std::set<std::size_t> used;
    while (name.size() < words) {
      const std::size_t i = rng() % kWords.size();
      if (used.insert(i).second) name.push_back(kWords[i]);
    }
    if (seen.insert(name).second) out.push_back(name);
  }
  return out;
}

}  // namespace

std::string TaskFixture::ground_truth_csv() const {
  std::string out = "source,target,label\n";
  for (const auto& p : truth) {
    const std::string row[] = {p.source, p.target, "accept"};
    append_csv_row(out, row);
  }
  return out;
}

TaskFixture scale_task(std::size_t sources, std::size_t targets, std::size_t rows,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto tnames = distinct_names(rng, targets, 3);
  std::vector<std::string> target_names, source_names;
  std::vector<std::vector<std::string>> tcols, scols;
  std::vector<int> kinds;
  for (std::size_t i = 0; i < targets; ++i) {
    target_names.push_back(snake(tnames[i]));
    kinds.push_back(static_cast<int>(rng() % 3));
    tcols.push_back(column(rng, kinds.back(), rows));
  }
  TaskFixture f;
  // Each source renames a distinct target (camel case, or a word dropped).
  std::vector<std::size_t> order(targets);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::set<std::string> used;
  for (std::size_t i = 0; i < sources; ++i) {
    const std::size_t t = order[i % targets];
    auto words = tnames[t];
    if (i % 3 == 0) words.pop_back();
    std::string name = camel(words);
    if (!used.insert(name).second) {
      name = camel(tnames[t]) + std::to_string(i);
      used.insert(name);
    }
    source_names.push_back(name);
    scols.push_back(column(rng, kinds[t], rows));
    f.truth.push_back({name, target_names[t]});
  }
  f.source_csv = table_csv(source_names, scols, rows);
  f.target_csv = table_csv(target_names, tcols, rows);
  return f;
}

TaskFixture aligned_task(std::size_t pairs, std::size_t distractors, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto names = distinct_names(rng, pairs + distractors, 2);
  const std::size_t rows = 20;
  std::vector<std::string> snames, tnames;
  std::vector<std::vector<std::string>> scols, tcols;
  TaskFixture f;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::string s = snake(names[i]);
    // One substituted letter in the last word, camel-cased.
    auto words = names[i];
    auto& w = words.back();
    const std::size_t at = w.size() / 2;
    w[at] = w[at] == 'x' ? 'y' : 'x';
    const std::string t = camel(words);
    snames.push_back(s);
    tnames.push_back(t);
    const int kind = static_cast<int>(i % 3);
    scols.push_back(column(rng, kind, rows));
    tcols.push_back(column(rng, kind, rows));
    f.truth.push_back({s, t});
  }
  for (std::size_t i = pairs; i < pairs + distractors; ++i) {
    tnames.push_back(camel(names[i]) + "Alt");
    tcols.push_back(column(rng, static_cast<int>(i % 3), rows));
  }
  // Deterministic shuffle of the target column order.
  std::vector<std::size_t> order(tnames.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::string> tn;
  std::vector<std::vector<std::string>> tc;
  for (auto i : order) {
    tn.push_back(tnames[i]);
    tc.push_back(tcols[i]);
  }
  f.source_csv = table_csv(snames, scols, rows);
  f.target_csv = table_csv(tn, tc, rows);
  return f;
}

TaskFixture easy_match_task(std::size_t identical, std::size_t disjoint, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto names = distinct_names(rng, identical, 2);
  const std::size_t rows = 10;
  std::vector<std::string> snames, tnames;
  std::vector<std::vector<std::string>> scols, tcols;
  TaskFixture f;
  for (std::size_t i = 0; i < identical; ++i) {
    // Alternate the casing style between sides.
    const bool flip = i % 2 == 0;
    const std::string s = flip ? camel(names[i]) : snake(names[i]);
    std::string t = flip ? snake(names[i]) : camel(names[i]);
    if (i % 5 == 0) t = "__" + t;  // leading separators canonicalize away
    snames.push_back(s);
    tnames.push_back(t);
    f.truth.push_back({s, t});
  }
  std::set<std::string> used;
  for (std::size_t i = 0; i < disjoint; ++i) {
    std::string s, t;
    do {
      s = random_word(rng, 9);
    } while (!used.insert(s).second);
    do {
      t = random_word(rng, 9);
    } while (!used.insert(t).second);
    snames.push_back("q" + s);
    tnames.push_back("v" + t);
  }
  for (std::size_t i = 0; i < snames.size(); ++i) scols.push_back(column(rng, 0, rows));
  for (std::size_t i = 0; i < tnames.size(); ++i) tcols.push_back(column(rng, 0, rows));
  f.source_csv = table_csv(snames, scols, rows);
  f.target_csv = table_csv(tnames, tcols, rows);
  return f;
}

MetricInstance random_metric_instance(std::uint64_t seed, std::size_t max_sources,
                                      std::size_t max_matchers) {
  std::mt19937_64 rng(seed);
  MetricInstance inst;
  const std::size_t ns = 1 + rng() % max_sources;
  const std::size_t nt = 2 + rng() % 25;
  const std::size_t nm = 1 + rng() % max_matchers;
  inst.k = 1 + rng() % 12;
  std::vector<std::string> targets;
  for (std::size_t t = 0; t < nt; ++t) targets.push_back("t" + std::to_string(t));
  std::vector<std::size_t> perm(nt);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t s = 0; s < ns; ++s) {
    const std::string src = "s" + std::to_string(s);
    const auto roll = rng() % 10;
    // One-to-one ground truth: source s may only claim target perm[s].
    if (s < nt && roll < 6) inst.gt.accepted.insert({src, targets[perm[s]]});
    else if (s < nt && roll < 8) inst.gt.rejected.insert({src, targets[perm[s]]});
  }
  for (std::size_t m = 0; m < nm; ++m) {
    auto& per_source = inst.lists["m" + std::to_string(m)];
    for (std::size_t s = 0; s < ns; ++s) {
      if (rng() % 7 == 0) continue;  // matcher silent on this source
      std::vector<std::string> list = targets;
      std::shuffle(list.begin(), list.end(), rng);
      list.resize(rng() % (nt + 1));
      per_source["s" + std::to_string(s)] = list;
    }
  }
  return inst;
}

}  // namespace matchbench::fixtures
