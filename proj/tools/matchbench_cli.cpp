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

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "matchbench/benchmark_report.hpp"
#include "matchbench/error.hpp"
#include "matchbench/http_server.hpp"
#include "matchbench/pipeline.hpp"
#include "matchbench/service.hpp"
#include "matchbench/session.hpp"
#include "matchbench/text.hpp"

namespace mb = matchbench;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mb::Error(mb::ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
  if (!out) throw mb::Error(mb::ErrorCode::kIo, "cannot write " + path);
}

// Builtin ids plus id=command plugin entries.
std::vector<mb::MatcherSpec> matcher_specs(const std::vector<std::string>& builtins,
                                           const std::vector<std::string>& plugins,
                                           std::size_t top_k) {
  std::vector<mb::MatcherSpec> specs;
  for (const auto& id : builtins) {
    if (!mb::is_builtin_matcher(id)) {
      throw mb::Error(mb::ErrorCode::kValidation, "unknown builtin matcher '" + id + "'");
    }
    specs.push_back(mb::MatcherSpec::builtin(id, top_k));
  }
  for (const auto& entry : plugins) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw mb::Error(mb::ErrorCode::kValidation, "--plugin expects id=command, got '" + entry + "'");
    }
    auto argv = mb::split_command_line(entry.substr(eq + 1));
    if (argv.empty()) throw mb::Error(mb::ErrorCode::kValidation, "empty plugin command");
    specs.push_back(mb::MatcherSpec::external(entry.substr(0, eq), std::move(argv), top_k));
  }
  return specs;
}

struct TaskOptions {
  std::string source;
  std::string target;
  bool target_schema = false;
  std::vector<std::string> builtins{mb::kBuiltinMatchers.begin(), mb::kBuiltinMatchers.end()};
  std::vector<std::string> plugins;
  std::size_t top_k = 10;
  double easy_threshold = 0.95;
  double display_cutoff = 0.4;
  double plugin_timeout = 300.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--source", source, "Source dataset CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--target", target, "Target dataset or schema CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_flag("--target-schema", target_schema,
                  "Target is a name,description schema listing");
    cmd->add_option("--matchers", builtins, "Builtin matchers to run")->delimiter(',');
    cmd->add_option("--plugin", plugins, "External matcher as id=command (repeatable)");
    cmd->add_option("--top-k", top_k, "Candidates kept per source and matcher")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--easy-threshold", easy_threshold, "Auto-accept similarity threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--display-cutoff", display_cutoff, "Default candidate cutoff")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--plugin-timeout", plugin_timeout, "Seconds before a plugin is killed")
        ->check(CLI::PositiveNumber);
  }

  mb::EngineConfig config() const {
    mb::EngineConfig c;
    c.easy_threshold = easy_threshold;
    c.display_cutoff = display_cutoff;
    c.top_k = top_k;
    c.plugin_timeout = std::chrono::duration<double>(plugin_timeout);
    c.validate();
    return c;
  }
};

int run_serve(const std::string& host, int port, const std::string& data_dir, std::size_t workers,
              const std::string& runners_file, mb::LlmConfig llm) {
  mb::ServiceConfig cfg;
  cfg.data_dir = data_dir;
  cfg.workers = workers;
  cfg.llm = std::move(llm);
  if (!runners_file.empty()) {
    cfg.runners.merge(mb::RunnerTable::from_json(json::parse(read_file(runners_file))));
  }

  // Route SIGINT/SIGTERM to a waiter thread so shutdown runs outside a
  // signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  mb::Service service(std::move(cfg));
  mb::HttpServer server(service);
  const int bound = server.bind(host, port);
  std::cerr << "matchbench listening on http://" << host << ":" << bound << "\n";

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    std::cerr << "shutting down\n";
    server.stop();
  });
  server.listen();
  service.shutdown();
  // listen() may also return on its own; wake the waiter in that case.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schema matching curation and benchmarking service"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "matchbench-data";
  std::size_t workers = 2;
  std::string runners_file;
  mb::LlmConfig llm = mb::LlmConfig::from_env();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Listen port (0 picks a free one)")
      ->envname("MATCHBENCH_PORT")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--data-dir", data_dir, "Session root directory")
      ->envname("MATCHBENCH_DATA_DIR");
  serve->add_option("--workers", workers, "Matching job workers")->check(CLI::PositiveNumber);
  serve->add_option("--runners", runners_file, "JSON runner table {id: [argv..., \"{file}\"]}")
      ->check(CLI::ExistingFile);
  serve->add_option("--llm-url", llm.url, "Chat-completion endpoint")
      ->envname("MATCHBENCH_LLM_URL");
  serve->add_option("--llm-key", llm.api_key, "Bearer token for the endpoint")
      ->envname("MATCHBENCH_LLM_KEY");
  serve->add_option("--llm-model", llm.model, "Model name sent to the endpoint")
      ->envname("MATCHBENCH_LLM_MODEL");

  // match
  auto* match = app.add_subcommand("match", "Generate candidates for a task");
  TaskOptions match_opts;
  match_opts.add_to(match);
  std::string match_out;
  std::string session_dir;
  match->add_option("--out", match_out, "Output file (default stdout)");
  match->add_option("--session-dir", session_dir,
                    "Persist the session here for later curation or export");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Score matchers against a ground-truth CSV");
  TaskOptions bench_opts;
  bench_opts.add_to(bench);
  std::string ground_truth;
  std::string bench_out;
  std::size_t k = 10;
  bench->add_option("--ground-truth", ground_truth, "CSV with source,target,label")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--k", k, "Cutoff for recall@k and consensus")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "Report file (default stdout)");

  // export
  auto* exp = app.add_subcommand("export", "Export an artifact from a saved session");
  std::string exp_dir;
  std::string kind;
  std::string exp_out;
  std::string actor = "cli";
  exp->add_option("--session-dir", exp_dir, "Session directory")->required()->check(CLI::ExistingDirectory);
  exp->add_option("--kind", kind, "harmonized_csv, mapping_spec, ground_truth_csv or provenance")
      ->required();
  exp->add_option("--out", exp_out, "Output file (default stdout)");
  exp->add_option("--actor", actor, "Actor recorded on the export event");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(host, port, data_dir, workers, runners_file, llm);

    if (*match) {
      const auto cfg = match_opts.config();
      auto specs = matcher_specs(match_opts.builtins, match_opts.plugins, cfg.top_k);
      mb::Session session("cli", session_dir);
      session.begin_task(mb::TaskData::build(read_file(match_opts.source),
                                             read_file(match_opts.target),
                                             match_opts.target_schema),
                         cfg, std::move(specs));
      mb::run_task_pipeline(session);
      json candidates = json::array();
      for (const auto* c : session.state().candidates.ranked()) candidates.push_back(*c);
      json out{{"matchers", session.state().matchers},
               {"weights", session.state().weights},
               {"candidates", std::move(candidates)}};
      write_output(match_out, out.dump(2) + "\n");
      return 0;
    }

    if (*bench) {
      mb::BenchmarkOptions opts;
      opts.config = bench_opts.config();
      opts.matchers = matcher_specs(bench_opts.builtins, bench_opts.plugins, opts.config.top_k);
      opts.source_csv = read_file(bench_opts.source);
      opts.target_csv = read_file(bench_opts.target);
      opts.target_is_schema = bench_opts.target_schema;
      opts.ground_truth_csv = read_file(ground_truth);
      opts.k = k;
      write_output(bench_out, mb::run_benchmark(opts).dump(2) + "\n");
      return 0;
    }

    if (*exp) {
      const auto export_kind = mb::export_kind_from_string(kind);
      auto session = mb::Session::load(exp_dir);
      const std::string bytes = session->export_artifact(export_kind);
      write_output(exp_out, bytes);
      session->record_export(export_kind, actor);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
