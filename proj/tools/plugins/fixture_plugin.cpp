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

// Test plugin speaking the top_matches protocol.
//
//   fixture_plugin echo            name_edit scores, unchanged
//   fixture_plugin scramble        true best match pushed to rank 1 + (i % 5)
//   fixture_plugin crash           reads the request, exits 3 without output
//   fixture_plugin sleep [secs]    never answers within the host's timeout
//   fixture_plugin bad_score       reports a score of 1.5

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/text.hpp"

namespace {

struct Scored {
  std::string target;
  double score;
};

std::vector<Scored> name_edit_ranking(const std::string& source,
                                      const std::vector<std::string>& targets) {
  const auto s = matchbench::canonicalize_name(source).canonical;
  std::vector<Scored> out;
  for (const auto& t : targets) {
    const double v = matchbench::edit_similarity(s, matchbench::canonicalize_name(t).canonical);
    if (v > 0.0) out.push_back({t, v});
  }
  std::sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.target < b.target;
  });
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "echo";
  std::string line;
  if (!std::getline(std::cin, line)) return 2;
  if (mode == "crash") {
    std::cerr << "fixture: crashing on purpose\n";
    return 3;
  }
  if (mode == "sleep") {
    const int secs = argc > 2 ? std::stoi(argv[2]) : 600;
    std::this_thread::sleep_for(std::chrono::seconds(secs));
    return 0;
  }

  const auto request = nlohmann::json::parse(line);
  const std::size_t k = request.at("k").get<std::size_t>();
  std::vector<std::string> targets;
  for (const auto& t : request.at("target")) targets.push_back(t.at("name").get<std::string>());

  std::size_t index = 0;
  for (const auto& s : request.at("source")) {
    const auto name = s.at("name").get<std::string>();
    auto ranked = name_edit_ranking(name, targets);
    if (ranked.size() > k) ranked.resize(k);
    nlohmann::json matches = nlohmann::json::array();
    if (mode == "scramble" && !ranked.empty()) {
      const std::size_t slot = std::min(index % 5, ranked.size() - 1);
      Scored best = ranked.front();
      ranked.erase(ranked.begin());
      ranked.insert(ranked.begin() + static_cast<std::ptrdiff_t>(slot), best);
      // Strictly decreasing scores so the host keeps this order.
      for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].score = 1.0 - 0.05 * i;
    }
    for (const auto& r : ranked) {
      matches.push_back({{"target", r.target},
                         {"score", mode == "bad_score" ? 1.5 : r.score}});
    }
    std::cout << nlohmann::json{{"source", name}, {"matches", matches}}.dump() << "\n";
    ++index;
  }
  std::cout << R"({"op":"done"})" << "\n";
  std::cout.flush();
  return 0;
}
