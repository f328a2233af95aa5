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

#ifndef MATCHBENCH_ERROR_HPP_
#define MATCHBENCH_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace matchbench {

enum class ErrorCode {
  kParse,
  kValidation,
  kNotFound,
  kConflict,
  kNotReady,
  kEngine,
  kPlugin,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Base exception for every recoverable failure raised by the library. The
// HTTP layer maps codes to status classes, the CLI prints what() and exits
// nonzero.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  // 1-based physical line where the offending record starts.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace matchbench

#endif  // MATCHBENCH_ERROR_HPP_
