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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "matchbench/csv.hpp"
#include "test_server.hpp"

namespace matchbench {
namespace {

using nlohmann::json;
using test_support::TestServer;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class HttpApi : public ::testing::Test {
 protected:
  HttpApi() : fx_(fixtures::aligned_task(12, 4)) {
    id_ = server_.new_session();
    const auto st = server_.run_task(
        id_, {{"source_csv", fx_.source_csv},
              {"target_csv", fx_.target_csv},
              {"matchers", {"name_edit", "name_trigram", "value_overlap"}}});
    EXPECT_EQ(st["phase"], "done") << st.dump();
  }
  std::string path(const std::string& rest) const { return "/sessions/" + id_ + rest; }
  json decide(const Pair& p, const std::string& action, int expected = 200) {
    return server_.post_json(path("/decisions"),
                             {{"source", p.source}, {"target", p.target}, {"action", action}},
                             expected);
  }

  TestServer server_;
  fixtures::TaskFixture fx_;
  std::string id_;
};

TEST(HttpBasics, HealthSessionsAndErrors) {
  TestServer server;
  EXPECT_EQ(server.get_json("/health")["status"], "ok");
  const auto id = server.new_session();
  EXPECT_EQ(server.get_json("/sessions")["sessions"], json::array({id}));

  const auto missing = server.get_json("/sessions/nope/candidates", 404);
  EXPECT_EQ(missing["error"]["code"], "not_found");

  const auto early = server.get_json("/sessions/" + id + "/metrics", 409);
  EXPECT_TRUE(early["error"].contains("message"));

  auto res = server.client().Post("/sessions/" + id + "/task",
                                  json{{"source_csv", "a,b\n1,2\n3\n"}, {"target_csv", "x\n1\n"}}.dump(),
                                  "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  const auto err = json::parse(res->body)["error"];
  EXPECT_EQ(err["code"], "parse_error");
  EXPECT_EQ(err["line"], 3);

  res = server.client().Post("/sessions/" + id + "/decisions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST(HttpBasics, MultipartUploadWithSchemaTarget) {
  TestServer server;
  const auto id = server.new_session();
  httplib::MultipartFormDataItems items = {
      {"source", "age,tumor_grade\n40,G1\n50,G2\n", "source.csv", "text/csv"},
      {"target_schema", "name,description\nAge,Age in years\ntumorGrade,Histologic grade\n",
       "schema.csv", "text/csv"},
      {"matchers", "name_edit,name_token_jaccard", "", ""},
  };
  auto res = server.client().Post("/sessions/" + id + "/task", items);
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 202) << res->body;
  const auto st = server.service().wait_for_job(id);
  EXPECT_EQ(st.phase, JobPhase::kDone);
  const auto cands = server.get_json("/sessions/" + id + "/candidates?cutoff=0.01");
  std::set<std::string> statuses;
  for (const auto& c : cands["candidates"]) statuses.insert(c["status"].get<std::string>());
  EXPECT_TRUE(statuses.count("auto_accepted"));
  const auto profile = server.get_json("/sessions/" + id + "/profiles/Age?side=target");
  EXPECT_EQ(profile["row_count"], 0);
}

TEST_F(HttpApi, CandidatesHonorCutoffGroupsAndPaging) {
  const auto all = server_.get_json(path("/candidates?cutoff=0.05"));
  ASSERT_GT(all["total"].get<int>(), 0);
  for (const auto& c : all["candidates"]) EXPECT_GE(c["aggregate"].get<double>(), 0.05);

  const auto strict = server_.get_json(path("/candidates?cutoff=0.6"));
  EXPECT_LE(strict["total"].get<int>(), all["total"].get<int>());

  const auto page = server_.get_json(path("/candidates?cutoff=0.05&offset=2&limit=3"));
  ASSERT_EQ(page["candidates"].size(), 3u);
  EXPECT_EQ(page["candidates"][0], all["candidates"][2]);

  const std::string group = all["candidates"][0]["target_group"];
  const auto grouped = server_.get_json(path("/candidates?cutoff=0.05&group=" + group));
  ASSERT_GT(grouped["total"].get<int>(), 0);
  for (const auto& c : grouped["candidates"]) EXPECT_EQ(c["target_group"], group);

  EXPECT_EQ(server_.get_json(path("/candidates?group=no-such-group"), 400)["error"]["code"],
            "validation_error");

  // Default cutoff follows the session config.
  server_.put_json(path("/config"), {{"display_cutoff", 0.6}});
  EXPECT_EQ(server_.get_json(path("/candidates"))["total"], strict["total"]);
  server_.put_json(path("/config"), {{"display_cutoff", 2.0}}, 400);
}

TEST_F(HttpApi, DecisionsAreIdempotentAndAttributed) {
  const Pair p = fx_.truth[0];
  auto res = server_.client().Post(
      path("/decisions"), {{"X-Actor", "dana"}},
      json{{"source", p.source}, {"target", p.target}, {"action", "accept"}}.dump(),
      "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  const auto first = json::parse(res->body);
  EXPECT_TRUE(first["applied"].get<bool>());
  EXPECT_EQ(first["candidate"]["status"], "accepted");

  const auto again = decide(p, "accept");
  EXPECT_FALSE(again["applied"].get<bool>());
  EXPECT_EQ(again["seq"], first["seq"]);

  const auto prov = server_.get_json(path("/provenance"));
  ASSERT_EQ(prov["events"].size(), 1u);
  EXPECT_EQ(prov["events"][0]["actor"], "dana");
  EXPECT_EQ(prov["events"][0]["op"], "accept");
  EXPECT_EQ(server_.get_json(path("/provenance?after=1"))["events"].size(), 0u);

  // Another target for the same source conflicts.
  const auto cands = server_.get_json(path("/candidates?cutoff=0.01&source=" + p.source));
  for (const auto& c : cands["candidates"]) {
    if (c["target"] != p.target) {
      const auto err = decide({c["source"], c["target"]}, "accept", 409);
      EXPECT_EQ(err["error"]["code"], "conflict");
      break;
    }
  }
  decide({"ghost", "phantom"}, "accept", 404);
  decide(p, "explode", 400);

  const auto flagged = server_.post_json(
      path("/decisions"),
      {{"source", p.source}, {"target", p.target}, {"action", "flag"}, {"note", "units"}});
  EXPECT_EQ(flagged["candidate"]["note"], "units");
}

TEST_F(HttpApi, MetricsConsensusBreakdownExplain) {
  for (std::size_t i = 0; i < 5; ++i) decide(fx_.truth[i], "accept");
  const auto m = server_.get_json(path("/metrics?k=5"));
  EXPECT_EQ(m["k"], 5);
  EXPECT_EQ(m["evaluated_sources"], 5);
  EXPECT_TRUE(m["matchers"].contains("name_edit"));
  const auto c = server_.get_json(path("/consensus"));
  std::size_t total = 0;
  for (const auto& s : c["subsets"]) total += s["count"].get<std::size_t>();
  EXPECT_EQ(total, 5u);
  const auto b = server_.get_json(path("/breakdown"));
  EXPECT_TRUE(b["matchers"].contains("name_trigram"));

  const auto ex = server_.post_json(path("/explain"),
                                    {{"source", fx_.truth[0].source}, {"target", fx_.truth[0].target}});
  EXPECT_EQ(ex["criteria"].size(), 7u);
  EXPECT_FALSE(ex.contains("narrative"));
  EXPECT_FALSE(ex["warnings"].empty());
  const auto quiet = server_.post_json(
      path("/explain"),
      {{"source", fx_.truth[0].source}, {"target", fx_.truth[0].target}, {"narrative", false}});
  EXPECT_TRUE(quiet["warnings"].empty());
}

TEST_F(HttpApi, ValueMapViewAndEdit) {
  const Pair p = fx_.truth[1];
  const std::string vm = path("/value-map/" + p.source + "/" + p.target);
  const auto view = server_.get_json(vm);
  EXPECT_FALSE(view["stored"].get<bool>());
  const auto values = view["source_values"].get<std::vector<std::string>>();
  ASSERT_FALSE(values.empty());
  const auto put = server_.put_json(vm, {{"pairs", {{{"from", values[0]}, {"to", "X"}}}}});
  EXPECT_TRUE(put["stored"].get<bool>());
  EXPECT_TRUE(server_.get_json(vm)["stored"].get<bool>());
  server_.put_json(vm, {{"pairs", {{{"from", values[0]}, {"to", "X"}}, {{"from", values[0]}, {"to", "Y"}}}}},
                   400);
  server_.get_json(path("/value-map/ghost/" + p.target), 404);
}

TEST_F(HttpApi, MatcherRegistration) {
  const auto ok = server_.post_json(
      path("/matchers"),
      {{"id", "py_echo"}, {"runner", "python"}, {"code", read_file(MATCHBENCH_ECHO_PY)}}, 201);
  EXPECT_EQ(ok["matcher"]["status"], "ready") << ok.dump();

  const auto cands = server_.get_json(path("/candidates?cutoff=0.01"));
  bool scored = false;
  for (const auto& c : cands["candidates"]) {
    if (c["scores"].contains("py_echo")) {
      EXPECT_NEAR(c["scores"]["py_echo"].get<double>(), c["scores"]["name_edit"].get<double>(), 1e-9);
      scored = true;
    }
  }
  EXPECT_TRUE(scored);

  const auto crash = server_.post_json(
      path("/matchers"), {{"id", "crasher"}, {"command", {MATCHBENCH_FIXTURE_PLUGIN, "crash"}}}, 201);
  EXPECT_EQ(crash["matcher"]["status"], "failed");
  EXPECT_EQ(crash["matcher"]["failure_reason"], "exited with code 3 before done");

  server_.post_json(path("/matchers"), {{"id", "py_echo"}, {"command", "true"}}, 409);
  server_.post_json(path("/matchers"), {{"id", "x"}, {"runner", "cobol"}, {"code", "..."}}, 400);
  const auto bad_k = server_.post_json(
      path("/matchers"), {{"id", "y"}, {"command", "true"}, {"top_k", "ten"}}, 400);
  EXPECT_EQ(bad_k["error"]["code"], "validation_error");

  auto del = server_.client().Delete(path("/matchers/py_echo"));
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 200);
  const auto st = server_.get_json(path("/status"));
  for (const auto& m : st["matchers"]) EXPECT_NE(m["id"], "py_echo");
  EXPECT_EQ(server_.get_json(path("/metrics"))["matchers"].count("py_echo"), 0u);
}

TEST_F(HttpApi, ExportImportRoundTrip) {
  decide(fx_.truth[0], "accept");
  decide(fx_.truth[1], "reject");
  auto spec = server_.client().Get(path("/export/mapping_spec"));
  auto gt = server_.client().Get(path("/export/ground_truth_csv"));
  ASSERT_TRUE(spec && gt);
  EXPECT_EQ(gt->get_header_value("Content-Type").rfind("text/csv", 0), 0u);

  const auto other = server_.new_session();
  server_.run_task(other, {{"source_csv", fx_.source_csv},
                           {"target_csv", fx_.target_csv},
                           {"matchers", {"name_edit", "name_trigram", "value_overlap"}}});
  const std::string base = "/sessions/" + other;
  auto r1 = server_.client().Post(base + "/import?kind=mapping_spec", spec->body, "application/json");
  ASSERT_TRUE(r1);
  EXPECT_EQ(r1->status, 200) << r1->body;
  const auto r2 = server_.post_json(base + "/import", {{"kind", "ground_truth_csv"}, {"content", gt->body}});
  EXPECT_EQ(r2["skipped"].size(), 0u);
  EXPECT_EQ(server_.client().Get(base + "/export/mapping_spec")->body, spec->body);
  EXPECT_EQ(server_.client().Get(base + "/export/ground_truth_csv")->body, gt->body);

  const auto prov = server_.get_json(base + "/provenance");
  for (const auto& e : prov["events"]) EXPECT_EQ(e["actor"], "import");

  auto bad = server_.client().Post(base + "/import?kind=ground_truth_csv", "source,target,label\na\n",
                                   "text/csv");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  server_.get_json(base + "/export/nonsense", 400);
}

TEST_F(HttpApi, TaskResubmissionResetsSession) {
  decide(fx_.truth[0], "accept");
  server_.run_task(id_, {{"source_csv", fx_.source_csv}, {"target_csv", fx_.target_csv}});
  EXPECT_EQ(server_.get_json(path("/provenance"))["events"].size(), 0u);
  const auto st = server_.get_json(path("/status"));
  EXPECT_EQ(st["matchers"].size(), kBuiltinMatchers.size());
}

}  // namespace
}  // namespace matchbench
