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

#ifndef MATCHBENCH_PAIR_HPP_
#define MATCHBENCH_PAIR_HPP_

#include <compare>
#include <string>

namespace matchbench {

// A (source attribute, target attribute) correspondence key.
struct Pair {
  std::string source;
  std::string target;

  auto operator<=>(const Pair&) const = default;
  bool operator==(const Pair&) const = default;
};

}  // namespace matchbench

#endif  // MATCHBENCH_PAIR_HPP_
