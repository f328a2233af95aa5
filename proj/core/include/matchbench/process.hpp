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

#ifndef MATCHBENCH_PROCESS_HPP_
#define MATCHBENCH_PROCESS_HPP_

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace matchbench {

struct ProcessOutcome {
  bool spawned = false;
  std::string spawn_error;
  bool timed_out = false;
  // Valid when the child exited normally.
  bool exited = false;
  int exit_code = -1;
  int term_signal = 0;
  std::string out;
  std::string err;
};

// Launches argv[0] (PATH lookup) in its own process group, feeds `input` on
// stdin, and collects stdout/stderr until the child exits or `timeout`
// elapses; on timeout the whole group is killed. Output beyond `max_output`
// bytes per stream is discarded.
ProcessOutcome run_process(const std::vector<std::string>& argv,
                           std::string_view input,
                           std::chrono::duration<double> timeout,
                           std::size_t max_output = 64u << 20);

}  // namespace matchbench

#endif  // MATCHBENCH_PROCESS_HPP_
