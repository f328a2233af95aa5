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

#ifndef MATCHBENCH_TEXT_HPP_
#define MATCHBENCH_TEXT_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace matchbench {

struct CanonicalName {
  std::string canonical;
  std::vector<std::string> tokens;

  bool operator==(const CanonicalName&) const = default;
};

// Lowercases, splits camelCase at case boundaries, and collapses every run of
// non-alphanumeric bytes into one space. Bytes >= 0x80 are kept as part of a
// token so UTF-8 names survive intact. "Tumor_Stage" -> "tumor stage",
// "ageAtDiagnosis" -> "age at diagnosis", "BMI" -> "bmi".
CanonicalName canonicalize_name(std::string_view name);

// Lowercased, trimmed, inner whitespace collapsed. Used for cell values where
// punctuation is meaningful ("1.5", "n/a").
std::string canonicalize_value(std::string_view value);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - levenshtein / max(|a|, |b|); two empty strings are identical.
double edit_similarity(std::string_view a, std::string_view b);

// Sorted, unique character 3-grams of `canonical` padded with two spaces on
// each side.
std::vector<std::string> char_trigrams(std::string_view canonical);

// |a ∩ b| / |a ∪ b| over sorted unique ranges; 0 when both are empty.
template <typename T>
double sorted_jaccard(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

// Token-set Jaccard; tokens need not be sorted or unique.
double token_jaccard(std::vector<std::string> a, std::vector<std::string> b);

// Full-string decimal parse (leading/trailing whitespace allowed). Rejects
// inf/nan and anything with trailing garbage.
std::optional<double> parse_number(std::string_view text);

// Shortest decimal text that round-trips to the same double; integers print
// without a fractional part ("1", "-0.25", "1e+21").
std::string format_number(double value);

// ISO-8601 calendar date, optionally followed by 'T' or ' ' and hh:mm[:ss[.fff]]
// with an optional 'Z' or +hh:mm offset. Month/day ranges are checked.
bool is_iso_date(std::string_view text);

// Splits a command line on whitespace honouring single and double quotes.
std::vector<std::string> split_command_line(std::string_view text);

}  // namespace matchbench

#endif  // MATCHBENCH_TEXT_HPP_
