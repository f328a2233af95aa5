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

#ifndef MATCHBENCH_HTTP_SERVER_HPP_
#define MATCHBENCH_HTTP_SERVER_HPP_

#include <memory>
#include <string>

#include "matchbench/service.hpp"

namespace matchbench {

// JSON-over-HTTP front end for a Service. Routes:
//   POST   /sessions
//   POST   /sessions/{id}/task                 multipart (source, target|target_schema) or JSON
//   GET    /sessions/{id}/status
//   GET    /sessions/{id}/candidates           ?cutoff&group&source_group&source&status&offset&limit
//   POST   /sessions/{id}/decisions            {source, target, action, note?}
//   PUT    /sessions/{id}/config               {display_cutoff}
//   GET    /sessions/{id}/profiles/{attr}      ?side=source|target
//   GET    /sessions/{id}/value-map/{src}/{tgt}
//   PUT    /sessions/{id}/value-map/{src}/{tgt}
//   POST   /sessions/{id}/matchers             {id, command | code+runner, top_k?}
//   DELETE /sessions/{id}/matchers[/{mid}]     (?id= for the bare form)
//   POST   /sessions/{id}/rerun
//   GET    /sessions/{id}/metrics|consensus|breakdown|provenance
//   POST   /sessions/{id}/explain              {source, target, narrative?}
//   GET    /sessions/{id}/export/{kind}
//   POST   /sessions/{id}/import               ?kind=..., raw body or multipart `file`
// The acting user is taken from the X-Actor header (default "curator").
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port; port 0 picks a free one. Throws Io on failure.
  int bind(const std::string& host, int port);
  // Serves until stop(). Call bind() first.
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace matchbench

#endif  // MATCHBENCH_HTTP_SERVER_HPP_
