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

#include "matchbench/http_server.hpp"

#include <cmath>

#include <httplib.h>

#include "matchbench/error.hpp"
#include "matchbench/text.hpp"

namespace matchbench {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message, std::optional<std::size_t> line = std::nullopt) {
  json err{{"code", code}, {"message", message}};
  if (line) err["line"] = *line;
  send_json(res, {{"error", std::move(err)}}, status);
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("request body: ") + e.what());
  }
}

std::string actor_of(const httplib::Request& req, const json& body = json::object()) {
  if (body.is_object() && body.contains("actor") && body["actor"].is_string()) {
    return body["actor"].get<std::string>();
  }
  if (req.has_header("X-Actor")) return req.get_header_value("X-Actor");
  return "curator";
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

std::optional<double> number_param(const httplib::Request& req, const char* name) {
  auto raw = param(req, name);
  if (!raw) return std::nullopt;
  auto v = parse_number(*raw);
  if (!v) throw Error(ErrorCode::kValidation, std::string(name) + " must be a number");
  return v;
}

std::optional<std::size_t> count_param(const httplib::Request& req, const char* name) {
  auto v = number_param(req, name);
  if (!v) return std::nullopt;
  if (*v < 0 || *v != std::floor(*v)) {
    throw Error(ErrorCode::kValidation, std::string(name) + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(*v);
}

std::string str_field(const json& body, const char* name) {
  if (!body.is_object() || !body.contains(name) || !body[name].is_string()) {
    throw Error(ErrorCode::kValidation, std::string("missing string field '") + name + "'");
  }
  return body[name].get<std::string>();
}

Pair pair_of(const json& body) { return {str_field(body, "source"), str_field(body, "target")}; }

std::string content_type_for(ExportKind kind) {
  switch (kind) {
    case ExportKind::kHarmonizedCsv:
    case ExportKind::kGroundTruthCsv: return "text/csv";
    case ExportKind::kMappingSpec: return kJson;
    case ExportKind::kProvenance: return "application/x-ndjson";
  }
  return "application/octet-stream";
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) { routes(); }

  void routes();

  Service& service;
  httplib::Server server;
};

void HttpServer::Impl::routes() {
  server.set_payload_max_length(std::size_t{512} << 20);
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                  std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const ParseError& e) {
      send_error(res, 400, to_string(e.code()), e.what(), e.line());
    } catch (const Error& e) {
      send_error(res, http_status_for(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, to_string(ErrorCode::kValidation), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  });

  const std::string sid = "/sessions/([^/]+)";
  auto& svc = service;

  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"status", "ok"}});
  });

  server.Post("/sessions", [&svc](const httplib::Request&, httplib::Response& res) {
    send_json(res, svc.create_session(), 201);
  });
  server.Get("/sessions", [&svc](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"sessions", svc.session_ids()}});
  });

  server.Post(sid + "/task", [&svc](const httplib::Request& req, httplib::Response& res) {
    TaskRequest task;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("source")) throw Error(ErrorCode::kValidation, "missing 'source' upload");
      const auto src = req.get_file_value("source");
      task.source_csv = src.content;
      if (!src.filename.empty()) task.source_name = src.filename;
      const char* target_key = req.has_file("target_schema") ? "target_schema" : "target";
      if (!req.has_file(target_key)) throw Error(ErrorCode::kValidation, "missing 'target' upload");
      const auto tgt = req.get_file_value(target_key);
      task.target_csv = tgt.content;
      if (!tgt.filename.empty()) task.target_name = tgt.filename;
      task.target_is_schema = std::string_view(target_key) == "target_schema";
      if (req.has_file("target_is_schema")) {
        const auto flag = to_lower(trim(req.get_file_value("target_is_schema").content));
        task.target_is_schema = flag == "1" || flag == "true" || flag == "yes";
      }
      if (req.has_file("matchers")) {
        const std::string raw = req.get_file_value("matchers").content;
        const std::string t = trim(raw);
        if (!t.empty() && (t.front() == '[' || t.front() == '{')) {
          task.matchers = json::parse(t);
        } else {
          for (std::string_view rest = t; !rest.empty();) {
            const auto comma = rest.find(',');
            const std::string id = trim(rest.substr(0, comma));
            if (!id.empty()) task.matchers.push_back(id);
            rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
          }
        }
      }
      if (req.has_file("config")) task.config = json::parse(req.get_file_value("config").content);
    } else {
      const json body = body_json(req);
      task.source_csv = str_field(body, "source_csv");
      task.target_csv = str_field(body, "target_csv");
      task.target_is_schema = body.value("target_is_schema", false);
      task.source_name = body.value("source_name", task.source_name);
      task.target_name = body.value("target_name", task.target_name);
      if (body.contains("matchers")) task.matchers = body["matchers"];
      if (body.contains("config")) task.config = body["config"];
    }
    send_json(res, svc.create_task(req.matches[1], std::move(task)), 202);
  });

  server.Get(sid + "/status", [&svc](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    json out = svc.status(id);
    svc.read_session(id, [&](const Session& s) {
      out["matchers"] = s.state().matchers;
      out["ready"] = s.ready();
      if (s.task_error()) out["task_error"] = *s.task_error();
    });
    send_json(res, out);
  });

  server.Get(sid + "/candidates", [&svc](const httplib::Request& req, httplib::Response& res) {
    CandidateQuery q;
    q.cutoff = number_param(req, "cutoff");
    q.group = param(req, "group");
    q.source_group = param(req, "source_group");
    q.source = param(req, "source");
    q.status = param(req, "status");
    q.offset = count_param(req, "offset").value_or(0);
    q.limit = count_param(req, "limit");
    send_json(res, svc.candidates(req.matches[1], q));
  });

  server.Post(sid + "/decisions", [&svc](const httplib::Request& req, httplib::Response& res) {
    const json body = body_json(req);
    DecisionRequest d;
    d.pair = pair_of(body);
    d.action = decision_action_from_string(str_field(body, "action"));
    if (body.contains("note") && !body["note"].is_null()) d.note = str_field(body, "note");
    d.actor = actor_of(req, body);
    send_json(res, svc.decide(req.matches[1], d));
  });

  server.Put(sid + "/config", [&svc](const httplib::Request& req, httplib::Response& res) {
    const json body = body_json(req);
    if (!body.contains("display_cutoff") || !body["display_cutoff"].is_number()) {
      throw Error(ErrorCode::kValidation, "display_cutoff must be a number");
    }
    send_json(res, svc.set_threshold(req.matches[1], body["display_cutoff"].get<double>(),
                                     actor_of(req, body)));
  });

  server.Get(sid + "/profiles/([^/]+)", [&svc](const httplib::Request& req,
                                                httplib::Response& res) {
    const Side side = side_from_string(param(req, "side").value_or("source"));
    send_json(res, svc.profile(req.matches[1], side, req.matches[2]));
  });

  const std::string vm = sid + "/value-map/([^/]+)/([^/]+)";
  server.Get(vm, [&svc](const httplib::Request& req, httplib::Response& res) {
    const double threshold = number_param(req, "threshold").value_or(kDefaultValueThreshold);
    send_json(res, svc.value_map(req.matches[1], {req.matches[2], req.matches[3]}, threshold));
  });
  server.Put(vm, [&svc](const httplib::Request& req, httplib::Response& res) {
    const json body = body_json(req);
    send_json(res, svc.put_value_map(req.matches[1], {req.matches[2], req.matches[3]}, body,
                                     actor_of(req, body)));
  });

  server.Post(sid + "/matchers", [&svc](const httplib::Request& req, httplib::Response& res) {
    const json body = body_json(req);
    MatcherRegistration reg;
    reg.id = str_field(body, "id");
    if (body.contains("command")) {
      reg.command = body["command"].is_string()
                        ? split_command_line(body["command"].get<std::string>())
                        : body["command"].get<std::vector<std::string>>();
    }
    if (body.contains("code")) reg.code = str_field(body, "code");
    if (body.contains("runner")) reg.runner = str_field(body, "runner");
    if (body.contains("top_k")) reg.top_k = body["top_k"].get<std::size_t>();
    send_json(res, svc.add_matcher(req.matches[1], reg, actor_of(req, body)), 201);
  });
  server.Delete(sid + "/matchers", [&svc](const httplib::Request& req, httplib::Response& res) {
    const json body = body_json(req);
    std::string mid;
    if (auto p = param(req, "id")) {
      mid = *p;
    } else {
      mid = str_field(body, "id");
    }
    svc.remove_matcher(req.matches[1], mid, actor_of(req, body));
    send_json(res, {{"removed", mid}});
  });
  server.Delete(sid + "/matchers/([^/]+)", [&svc](const httplib::Request& req,
                                                   httplib::Response& res) {
    svc.remove_matcher(req.matches[1], req.matches[2], actor_of(req));
    send_json(res, {{"removed", std::string(req.matches[2])}});
  });
  server.Post(sid + "/rerun", [&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.rerun(req.matches[1], actor_of(req, body_json(req))));
  });

  server.Get(sid + "/metrics", [&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.metrics(req.matches[1], count_param(req, "k")));
  });
  server.Get(sid + "/consensus", [&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.consensus(req.matches[1], count_param(req, "k")));
  });
  server.Get(sid + "/breakdown", [&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.breakdown(req.matches[1]));
  });
  server.Get(sid + "/provenance", [&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.provenance(req.matches[1], count_param(req, "after").value_or(0)));
  });

  server.Post(sid + "/explain", [&svc](const httplib::Request& req, httplib::Response& res) {
    const json body = body_json(req);
    send_json(res, svc.explain(req.matches[1], pair_of(body), body.value("narrative", true)));
  });

  server.Get(sid + "/export/([^/]+)", [&svc](const httplib::Request& req,
                                              httplib::Response& res) {
    const ExportKind kind = export_kind_from_string(std::string(req.matches[2]));
    res.set_content(svc.export_artifact(req.matches[1], kind), content_type_for(kind));
  });

  server.Post(sid + "/import", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> kind = param(req, "kind");
    std::string content;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) throw Error(ErrorCode::kValidation, "missing 'file' upload");
      content = req.get_file_value("file").content;
      if (!kind && req.has_file("kind")) kind = trim(req.get_file_value("kind").content);
    } else if (!kind) {
      const json body = body_json(req);
      kind = str_field(body, "kind");
      content = str_field(body, "content");
    } else {
      content = req.body;
    }
    if (!kind) throw Error(ErrorCode::kValidation, "missing import kind");
    // Imported decisions are always attributed to the import actor.
    send_json(res, svc.import_artifact(req.matches[1], import_kind_from_string(*kind), content,
                                       std::string(kImportActor)));
  });
}

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace matchbench
