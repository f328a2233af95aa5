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

#ifndef MATCHBENCH_CSV_HPP_
#define MATCHBENCH_CSV_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace matchbench {

using CsvRow = std::vector<std::string>;

// RFC 4180 reader. Accepts LF or CRLF record separators, a leading UTF-8 BOM,
// and quoted fields containing separators, quotes ("") and line breaks.
// Blank lines are skipped. Every record must have as many fields as the first
// one. Throws ParseError carrying the 1-based line of the offending record.
std::vector<CsvRow> parse_csv(std::string_view text);

// Quotes a field only when it contains a comma, quote, CR/LF or leading or
// trailing whitespace.
std::string csv_escape(std::string_view field);

void append_csv_row(std::string& out, std::span<const std::string> fields);

}  // namespace matchbench

#endif  // MATCHBENCH_CSV_HPP_
