#include <gtest/gtest.h>

#include <set>
#include <thread>

#include "support.hpp"
#include "wpsenv/chaining.hpp"
#include "wpsenv/wps/client.hpp"
#include "wpsenv/wps/codec.hpp"

using namespace wpsenv;
using nlohmann::json;

namespace {

std::string execute_xml(const std::string& process, std::vector<wps::NamedValue> inputs, bool async) {
  wps::ExecuteRequest req;
  req.process_id = process;
  req.inputs = std::move(inputs);
  req.response_form.store_results = async;
  req.response_form.status = async;
  return wps::encode_execute(req);
}

json wait_terminal(const test::LiveServer& s, const std::string& id) {
  for (int i = 0; i < 400; ++i) {
    auto r = s.get("/api/executions/" + id).json();
    auto state = r["status"]["state"].get<std::string>();
    if (state == "succeeded" || state == "failed") return r;
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
  ADD_FAILURE() << "execution " << id << " never finished";
  return {};
}

}  // namespace

class GatewayTest : public ::testing::Test {
 protected:
  test::LiveServer s;
};

TEST_F(GatewayTest, CapabilitiesListLocalProcesses) {
  auto caps = wps::Client(s.wps_url()).get_capabilities();
  std::set<std::string> ids;
  for (const auto& b : caps.process_briefs) ids.insert(b.identifier);
  EXPECT_EQ(ids, (std::set<std::string>{"vector2grid", "road2grid", "g_sum", "slow_echo"}));
  auto d = wps::Client(s.wps_url()).describe_process("road2grid");
  ASSERT_EQ(d.inputs.size(), 3u);
  EXPECT_EQ(d.inputs[2].identifier, "sumpol");
  EXPECT_EQ(d.outputs[0].identifier, "result");
}

TEST_F(GatewayTest, WpsKvpErrors) {
  auto missing = s.raw_get("/wps?request=GetCapabilities");
  EXPECT_EQ(missing.status, 400);
  auto report = wps::parse_exception_report(missing.body);
  ASSERT_TRUE(report);
  EXPECT_EQ(report->code, "MissingParameterValue");
  EXPECT_EQ(report->locator, "service");

  auto version = s.raw_get("/wps?service=WPS&request=DescribeProcess&version=2.0.0&identifier=g_sum");
  EXPECT_EQ(wps::parse_exception_report(version.body)->code, "VersionNegotiationFailed");
  auto unknown = s.raw_get("/wps?service=WPS&request=DescribeProcess&version=1.0.0&identifier=nope");
  EXPECT_EQ(unknown.status, 400);
  EXPECT_EQ(wps::parse_exception_report(unknown.body)->locator, "identifier");
  // parameter names are case-insensitive
  auto all = s.raw_get("/wps?SERVICE=wps&Request=DescribeProcess&identifier=ALL");
  EXPECT_EQ(all.status, 200);
  EXPECT_EQ(wps::parse_process_description(all.body).identifier, "vector2grid");
  auto garbage = s.raw_post("/wps", "<not-xml", "text/xml");
  EXPECT_EQ(garbage.status, 400);
  EXPECT_TRUE(wps::parse_exception_report(garbage.body));
}

TEST_F(GatewayTest, WpsExecuteSyncWithInlineGrids) {
  auto spec = test::read_fixture("grid_spec.asc");
  auto points = test::read_fixture("points.csv");
  auto r = s.raw_post("/wps",
                      execute_xml("vector2grid",
                                  {{"points", wps::ComplexInline{points, "text/plain"}},
                                   {"grid_spec", wps::ComplexInline{spec, "text/plain"}}},
                                  false),
                      "text/xml");
  ASSERT_EQ(r.status, 200) << r.body;
  auto resp = wps::parse_execute_response(r.body);
  ASSERT_TRUE(std::holds_alternative<wps::Succeeded>(resp.status.state));
  ASSERT_EQ(resp.outputs.size(), 1u);
  const auto& ref = std::get<wps::ComplexRef>(resp.outputs[0].second);
  EXPECT_EQ(test::grid_rows(wps::fetch_bytes(ref.href)), (std::vector<std::vector<double>>{{1, 5}, {3, 0}}));
}

TEST_F(GatewayTest, WpsExecuteAsyncPollsStatusLocation) {
  auto r = s.raw_post("/wps",
                      execute_xml("slow_echo", {{"payload", wps::LiteralVal{"hi"}}, {"duration", wps::LiteralVal{"0.5"}}},
                                  true),
                      "text/xml");
  ASSERT_EQ(r.status, 200) << r.body;
  auto resp = wps::parse_execute_response(r.body);
  ASSERT_TRUE(resp.status_location);
  EXPECT_FALSE(std::holds_alternative<wps::Succeeded>(resp.status.state));
  for (int i = 0; i < 100 && !std::holds_alternative<wps::Succeeded>(resp.status.state); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    resp = wps::fetch_status(*resp.status_location);
  }
  ASSERT_TRUE(std::holds_alternative<wps::Succeeded>(resp.status.state));
  EXPECT_EQ(std::get<wps::LiteralVal>(resp.outputs.at(0).second).text, "hi");
}

TEST_F(GatewayTest, WpsExecuteRejectsBadInputs) {
  auto bad = s.raw_post("/wps",
                        execute_xml("slow_echo", {{"payload", wps::LiteralVal{"x"}}, {"duration", wps::LiteralVal{"-1"}}},
                                    false),
                        "text/xml");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(wps::parse_exception_report(bad.body)->locator, "duration");
  auto unknown = s.raw_post("/wps", execute_xml("slow_echo", {{"nope", wps::LiteralVal{"x"}}}, false), "text/xml");
  EXPECT_EQ(unknown.status, 400);
  auto missing = s.raw_post("/wps", execute_xml("nope", {}, false), "text/xml");
  EXPECT_EQ(wps::parse_exception_report(missing.body)->code, "InvalidParameterValue");
}

TEST_F(GatewayTest, AuthIsRequired) {
  EXPECT_EQ(s.get("/api/services", "").status, 401);
  EXPECT_EQ(s.get("/api/services", "tok-nobody").status, 401);
  auto r = s.get("/api/services", "tok-nobody");
  EXPECT_EQ(r.json()["error"], "unauthorized");
  EXPECT_EQ(s.get("/api/services").status, 200);
}

TEST_F(GatewayTest, ServiceSearchAndShow) {
  auto all = s.get("/api/services").json();
  EXPECT_EQ(all.size(), 4u);
  auto grid = s.get("/api/services?q=grid").json();
  ASSERT_EQ(grid.size(), 3u);
  auto one = s.get("/api/services/g_sum");
  EXPECT_EQ(one.status, 200);
  EXPECT_EQ(one.json()["wrapper_name"], "g_sum");
  EXPECT_EQ(s.get("/api/services/" + one.json()["local_id"].get<std::string>()).json()["wrapper_name"], "g_sum");
  EXPECT_EQ(s.get("/api/services/nothing").status, 404);
}

TEST_F(GatewayTest, FourStepRegistrationOfARemoteService) {
  test::LiveServer remote;
  auto begin = s.post("/api/services", {{"step", "begin"}, {"display_name", "Remote sum"}, {"endpoint", remote.wps_url()}});
  ASSERT_EQ(begin.status, 201) << begin.body;
  std::string draft = begin.json()["draft_id"];
  EXPECT_EQ(s.post("/api/services", {{"step", "list"}, {"draft_id", draft}}, "tok-bob").status, 404);
  auto list = s.post("/api/services", {{"step", "list"}, {"draft_id", draft}}).json();
  EXPECT_EQ(list["processes"].size(), 4u);
  auto sel = s.post("/api/services", {{"step", "select"}, {"draft_id", draft}, {"identifier", "g_sum"}}).json();
  EXPECT_EQ(sel["description"]["inputs"][0]["suggested_widget"], "file");
  EXPECT_EQ(sel["description"]["outputs"][0]["suggested_widget"], "file_save");
  EXPECT_EQ(sel["suggested_wrapper_name"], "g_sum_2");

  json bindings = json::array();
  for (const char* id : {"a", "b"}) bindings.push_back({{"param_id", id}, {"widget", {{"kind", "file"}}}});
  bindings.push_back({{"param_id", "result"}, {"widget", {{"kind", "checkbox"}}}});
  auto bad = s.post("/api/services", {{"step", "finalize"}, {"draft_id", draft}, {"bindings", bindings}, {"wrapper_name", "rsum"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.json()["widget"], "checkbox");
  bindings[2]["widget"]["kind"] = "file_save";
  auto fin = s.post("/api/services", {{"step", "finalize"}, {"draft_id", draft}, {"bindings", bindings}, {"wrapper_name", "rsum"}});
  ASSERT_EQ(fin.status, 201) << fin.body;
  EXPECT_EQ(fin.json()["kind"], "remote");

  // remote execution: store files travel as one-time links
  s.seed_fixtures();
  auto run = s.post("/api/executions", {{"service_id", "rsum"},
                                        {"mode", "sync"},
                                        {"values", {{"a", "in/grid_spec.asc"}, {"b", "in/grid_spec.asc"}, {"result", "out/r.asc"}}}});
  ASSERT_EQ(run.status, 200) << run.body;
  auto inst = run.json();
  EXPECT_EQ(inst["status"]["state"], "succeeded") << inst.dump();
  auto href = inst["marshaled_inputs"][0]["value"]["href"].get<std::string>();
  EXPECT_EQ(href.rfind(s.base() + "/files/", 0), 0u);
  EXPECT_EQ(s.raw_get(href.substr(s.base().size())).status, 410);  // terminated with the instance
  EXPECT_EQ(s.get("/api/files/out/r.asc").status, 200);
  // a draft is gone once finalized
  EXPECT_EQ(s.post("/api/services", {{"step", "list"}, {"draft_id", draft}}).status, 404);
}

TEST_F(GatewayTest, RegistrationAgainstDeadEndpoint) {
  auto begin = s.post("/api/services", {{"step", "begin"}, {"display_name", "x"}, {"endpoint", "http://127.0.0.1:1/wps"}});
  ASSERT_EQ(begin.status, 201);
  auto list = s.post("/api/services", {{"step", "list"}, {"draft_id", begin.json()["draft_id"]}});
  EXPECT_EQ(list.status, 502);
  EXPECT_EQ(list.json()["error"], "network_error");
  EXPECT_EQ(s.post("/api/services", {{"step", "nope"}, {"draft_id", "d"}}).status, 404);
  EXPECT_EQ(s.post("/api/services", {{"step", "begin"}, {"display_name", "x"}, {"endpoint", "ftp://x"}}).status, 400);
}

TEST_F(GatewayTest, AsyncExecutionLogShowsProgress) {
  auto r = s.post("/api/executions",
                  {{"service_id", "slow_echo"}, {"values", {{"payload", "p"}, {"duration", 1}}}});
  ASSERT_EQ(r.status, 202) << r.body;
  std::string id = r.json()["id"];
  std::set<int> percents;
  std::size_t since = 0;
  for (int i = 0; i < 200; ++i) {
    auto page = s.get("/api/executions/" + id + "/log?since=" + std::to_string(since)).json();
    since = page["next"];
    auto inst = s.get("/api/executions/" + id).json();
    if (inst["status"]["state"] == "started") percents.insert(inst["status"]["percent"].get<int>());
    if (page["terminal"].get<bool>()) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
  }
  EXPECT_GE(percents.size(), 2u);
  auto done = wait_terminal(s, id);
  EXPECT_EQ(done["results"][0]["text"], "p");
  EXPECT_EQ(s.get("/api/executions/" + id + "/log?since=x").status, 400);
  EXPECT_EQ(s.get("/api/executions/" + id, "tok-bob").status, 404);
}

TEST_F(GatewayTest, CancelOverRest) {
  auto r = s.post("/api/executions", {{"service_id", "slow_echo"}, {"values", {{"payload", "p"}, {"duration", 30}}}});
  std::string id = r.json()["id"];
  auto c = s.post("/api/executions/" + id + "/cancel", json::object());
  ASSERT_EQ(c.status, 200);
  EXPECT_TRUE(c.json()["cancelled"].get<bool>());
  auto done = wait_terminal(s, id);
  EXPECT_EQ(done["status"]["message"], "cancelled");
  EXPECT_FALSE(s.post("/api/executions/" + id + "/cancel", json::object()).json()["cancelled"].get<bool>());
  EXPECT_EQ(s.post("/api/executions/zzz/cancel", json::object()).status, 404);
}

TEST_F(GatewayTest, ExecutionValidationErrors) {
  auto bad = s.post("/api/executions", {{"service_id", "slow_echo"}, {"values", {{"payload", "p"}, {"duration", 9999}}}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.json()["widget"], "number");
  EXPECT_EQ(s.post("/api/executions", {{"service_id", "nope"}}).status, 404);
  EXPECT_EQ(s.post("/api/executions", {{"service_id", "slow_echo"}, {"mode", "later"}}).status, 400);
  EXPECT_EQ(s.post("/api/executions", {{"service_id", "slow_echo"}, {"values", {{"x", 1}}}}).status, 400);
  auto missing_file = s.post("/api/executions", {{"service_id", "g_sum"}, {"values", {{"a", "in/none.asc"}}}});
  EXPECT_EQ(missing_file.status, 400);
  EXPECT_EQ(missing_file.json()["widget"], "file");
}

TEST_F(GatewayTest, FilesRoundTrip) {
  std::string bytes("a\0b\xff", 4);
  auto put = s.put("/api/files/dir/x.bin", bytes);
  ASSERT_EQ(put.status, 200);
  EXPECT_EQ(put.json()["size"], 4);
  EXPECT_EQ(s.get("/api/files/dir/x.bin").body, bytes);
  auto ls = s.get("/api/files?dir=dir").json();
  EXPECT_EQ(ls["entries"][0]["name"], "x.bin");
  EXPECT_EQ(ls["used_bytes"], 4);
  EXPECT_EQ(s.get("/api/files/dir/x.bin", "tok-bob").status, 404);
  EXPECT_EQ(s.get("/api/files/../etc/passwd").status, 400);
  EXPECT_EQ(s.del("/api/files/dir/x.bin").status, 204);
  EXPECT_EQ(s.del("/api/files/dir/x.bin").status, 404);
}

TEST_F(GatewayTest, OneTimeLinks) {
  s.env().store().put_file("alice", "f.txt", "data");
  auto live = s.post("/api/executions", {{"service_id", "slow_echo"}, {"values", {{"payload", "p"}, {"duration", 30}}}});
  std::string inst = live.json()["id"];
  auto path = s.env().links().mint(inst, "alice", "f.txt", 2).url_path();
  EXPECT_EQ(s.raw_get(path).status, 200);
  EXPECT_EQ(s.raw_get(path).body, "data");
  EXPECT_EQ(s.raw_get(path).status, 410);
  EXPECT_EQ(s.raw_get("/files/unknown").status, 404);
  auto other = s.env().links().mint(inst, "alice", "f.txt", 2).url_path();
  s.post("/api/executions/" + inst + "/cancel", json::object());
  EXPECT_EQ(s.raw_get(other).status, 410);
}

TEST_F(GatewayTest, ScenarioPublishReportsSyntaxPosition) {
  auto pkg = json::parse(test::read_fixture("road_pnt_pol.json"));
  pkg["wrapper_name"] = "broken";
  pkg["source"] = "function road_pnt_pol(housefile, roadsources, gridspec, sumpol, commonresult) {\n  var x = ;\n}";
  auto r = s.post("/api/scenarios", pkg);
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.json()["error"], "script_error");
  EXPECT_EQ(r.json()["line"], 2);
  EXPECT_EQ(r.json()["col"], 11);

  auto ok = s.post("/api/scenarios", json::parse(test::read_fixture("road_pnt_pol.json")));
  ASSERT_EQ(ok.status, 201) << ok.body;
  EXPECT_EQ(ok.json()["kind"], "scenario");
  auto dup = s.post("/api/scenarios", json::parse(test::read_fixture("road_pnt_pol.json")));
  EXPECT_EQ(dup.status, 409);
  EXPECT_EQ(dup.json()["error"], "duplicate_wrapper");
  EXPECT_EQ(s.post("/api/scenarios", json::parse("[1]")).status, 400);
}

TEST_F(GatewayTest, PublishedScenarioIsAWpsProcess) {
  s.seed_fixtures();
  ASSERT_EQ(s.post("/api/scenarios", json::parse(test::read_fixture("road_pnt_pol.json"))).status, 201);
  auto caps = wps::Client(s.wps_url()).get_capabilities();
  bool listed = false;
  for (const auto& b : caps.process_briefs) listed |= b.identifier == "road_pnt_pol";
  EXPECT_TRUE(listed);

  auto run = s.post("/api/executions", {{"service_id", "road_pnt_pol"},
                                        {"mode", "async"},
                                        {"values",
                                         {{"housefile", "in/points.csv"},
                                          {"roadsources", "in/roads.csv"},
                                          {"gridspec", "in/grid_spec.asc"},
                                          {"sumpol", 1},
                                          {"commonresult", "out/c.asc"}}}});
  ASSERT_EQ(run.status, 202) << run.body;
  std::string id = run.json()["id"];
  auto done = wait_terminal(s, id);
  EXPECT_EQ(done["status"]["state"], "succeeded") << done.dump();
  EXPECT_EQ(done["children"].size(), 3u);
  EXPECT_EQ(s.get("/api/executions?parent=" + id).json().size(), 3u);
  EXPECT_EQ(test::grid_rows(s.get("/api/files/out/c.asc").body), (std::vector<std::vector<double>>{{1, 5}, {7, 4}}));
}

TEST_F(GatewayTest, ChainsEndpointMatchesLibrary) {
  auto r = s.get("/api/chains");
  ASSERT_EQ(r.status, 200);
  auto expected = chaining::chainable_pairs(s.env().catalog().all());
  ASSERT_EQ(r.json().size(), expected.size());
  for (const auto& p : r.json()) {
    EXPECT_EQ(p["producer"]["dtype"]["kind"], p["consumer"]["dtype"]["kind"]);
  }
}

TEST(GatewayConfig, FromEnvAndValidation) {
  std::map<std::string, std::string> vars{{"WPSENV_BIND_ADDR", "0.0.0.0:9000"},
                                          {"WPSENV_POLL_INTERVAL_MS", "250"},
                                          {"WPSENV_PUBLIC_BASE_URL", "https://wps.example.org/"}};
  auto c = gateway::ApiConfig::from_env([&](const char* k) -> const char* {
    auto it = vars.find(k);
    return it == vars.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(c.host(), "0.0.0.0");
  EXPECT_EQ(c.port(), 9000);
  EXPECT_EQ(c.poll_interval_ms, 250u);
  EXPECT_EQ(c.base_url(), "https://wps.example.org");
  EXPECT_NO_THROW(c.validate());
  c.bind_addr = ":9000";
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(GatewayTokens, LoadAndReject) {
  test::TempDir d;
  EXPECT_TRUE(gateway::load_tokens(d.path() / "users.json").empty());
  std::ofstream(d.path() / "users.json") << R"({"tokens": {"t1": "alice"}})";
  EXPECT_EQ(gateway::load_tokens(d.path() / "users.json").at("t1"), "alice");
  std::ofstream(d.path() / "users.json") << R"({"tokens": {"t1": "_wps"}})";
  EXPECT_THROW(gateway::load_tokens(d.path() / "users.json"), ValidationError);
  std::ofstream(d.path() / "users.json") << "{";
  EXPECT_THROW(gateway::load_tokens(d.path() / "users.json"), ValidationError);
}
