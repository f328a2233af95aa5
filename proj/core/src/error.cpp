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

#include "matchbench/error.hpp"

namespace matchbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kNotReady: return "not_ready";
    case ErrorCode::kEngine: return "engine_error";
    case ErrorCode::kPlugin: return "plugin_error";
    case ErrorCode::kIo: return "io_error";
  }
  return "error";
}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace matchbench
