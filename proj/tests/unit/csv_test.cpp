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

#include "matchbench/csv.hpp"

#include <gtest/gtest.h>

#include "matchbench/error.hpp"

namespace matchbench {
namespace {

TEST(ParseCsv, QuotedFieldsAndLineEndings) {
  const auto rows = parse_csv("\xEF\xBB\xBFname,notes\r\n\"a,b\",\"say \"\"hi\"\"\"\r\nc,\"x\ny\"\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "name");
  EXPECT_EQ(rows[1][0], "a,b");
  EXPECT_EQ(rows[1][1], "say \"hi\"");
  EXPECT_EQ(rows[2][1], "x\ny");
}

TEST(ParseCsv, SkipsBlankLines) {
  const auto rows = parse_csv("a,b\n\n1,2\n\n");
  ASSERT_EQ(rows.size(), 2u);
}

TEST(ParseCsv, FieldCountMismatchReportsLine) {
  try {
    parse_csv("a,b\n1,2\n3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(ParseCsv, UnterminatedQuoteIsAnError) {
  EXPECT_THROW(parse_csv("a\n\"open\n"), ParseError);
}

TEST(CsvEscape, RoundTrips) {
  const std::vector<std::string> fields = {"plain", "with,comma", "quote\"d", " padded ",
                                           "multi\nline", ""};
  std::string out;
  append_csv_row(out, fields);
  const auto rows = parse_csv("h1,h2,h3,h4,h5,h6\n" + out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], fields);
  EXPECT_EQ(csv_escape("plain"), "plain");
}

}  // namespace
}  // namespace matchbench
