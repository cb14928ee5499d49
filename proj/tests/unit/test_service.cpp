#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "duet/context/laws.hpp"
#include "duet/schema/codec.hpp"
#include "duet/service/http.hpp"
#include "duet/service/persistence.hpp"
#include "duet/service/replay.hpp"
#include "httplib.h"
#include "support.hpp"

using namespace duet;
namespace fs = std::filesystem;

namespace {

constexpr const char* kGoal = "I want to go to Barcelona for a trip";

struct TempDir {
  fs::path path;
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path = fs::temp_directory_path() / ("duet-test-" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

ServiceParts scripted_parts(const fs::path& data_dir = {}) {
  ServiceParts parts;
  parts.provider = ScriptedProvider::from_directory(duet::test::barcelona_fixtures());
  parts.catalog = duet::test::shipped_catalog();
  parts.orchestrator.workers = 2;
  parts.data_dir = data_dir;
  parts.clock = std::make_shared<ManualClock>();
  parts.ids = sequential_id_generator();
  return parts;
}

// Replays the golden trace up to `steps` steps and returns the replayer.
std::unique_ptr<Replayer> partial_replay(std::size_t steps) {
  auto trace = Trace::load(duet::test::barcelona_trace());
  auto r = std::make_unique<Replayer>(trace, ScriptedProvider::from_directory(duet::test::barcelona_fixtures()),
                                      duet::test::shipped_catalog());
  for (std::size_t i = 0; i < steps && r->step(); ++i) {
  }
  return r;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::assertion_failed;
}

}  // namespace

TEST_SUITE("service") {

// ---- persistence ----------------------------------------------------------------

TEST_CASE("save and load mid-Plan keeps the hash") {
  auto r = partial_replay(18);
  const auto id = r->session_id();
  const auto original = r->context().snapshot(id);
  CHECK(original.stage == TaskStage::plan);

  const auto bytes = serialize(save_session(r->context(), id, 42));
  const auto parsed = parse_persisted_session(bytes);
  CHECK(parsed.schema_version == kSchemaBundleVersion);
  CHECK(parsed.saved_at == 42);
  ContextManager fresh;
  CHECK(load_session(fresh, parsed) == id);
  CHECK(fresh.snapshot(id).hash() == original.hash());
  CHECK(serialize(save_session(fresh, id, 42)) == bytes);
  CHECK(code_of([&] { load_session(fresh, parsed); }) == ErrorCode::session_exists);
}

TEST_CASE("loaded copies are isolated from the original") {
  auto r = partial_replay(12);
  const auto id = r->session_id();
  ContextManager fresh;
  load_session(fresh, parse_persisted_session(serialize(save_session(r->context(), id, 1))));
  const auto hash = fresh.snapshot(id).hash();
  r->context().record_action(id, ActionDraft{Actor::user, ActionKind::navigate, ActionTarget{"page-flights", {}, {}}, Json::object()});
  r->context().advance_stage(id, TaskStage::explore);
  CHECK(fresh.snapshot(id).hash() == hash);
  CHECK(r->context().snapshot(id).hash() != hash);
}

TEST_CASE("corrupt documents are refused") {
  auto r = partial_replay(3);
  const auto bytes = serialize(save_session(r->context(), r->session_id(), 1));
  CHECK(code_of([&] { parse_persisted_session(bytes.substr(0, bytes.size() / 2)); }) ==
        ErrorCode::corrupt_persisted_document);
  CHECK(code_of([&] { parse_persisted_session(""); }) == ErrorCode::corrupt_persisted_document);
  CHECK(code_of([&] { parse_persisted_session(R"({"sessionId": "x"})"); }) == ErrorCode::corrupt_persisted_document);

  Json doc = Json::parse(bytes);
  doc["schemaVersion"] = "999";
  CHECK(code_of([&] { parse_persisted_session(doc.dump()); }) == ErrorCode::schema_version_mismatch);

  Json broken = Json::parse(bytes);
  broken["session"]["history"][0]["seq"] = "one";
  CHECK(code_of([&] { parse_persisted_session(broken.dump()); }) == ErrorCode::corrupt_persisted_document);
}

TEST_CASE("the store writes one file per session and skips bad ones") {
  TempDir dir;
  auto r = partial_replay(6);
  SessionStore store(dir.path);
  store.save(r->context(), r->session_id(), 7);
  CHECK(fs::exists(store.path_for(r->session_id())));
  write_file(dir.path / "garbage.json", "{not json");

  ContextManager fresh;
  std::vector<std::string> problems;
  const auto loaded = store.load_all(fresh, &problems);
  CHECK(loaded == std::vector<std::string>{r->session_id()});
  CHECK(problems.size() == 1);
  CHECK(fresh.snapshot(r->session_id()).hash() == r->context().snapshot(r->session_id()).hash());
}

// ---- replay --------------------------------------------------------------------

TEST_CASE("replaying twice gives the same report") {
  const auto a = replay_files(duet::test::barcelona_trace());
  const auto b = replay_files(duet::test::barcelona_trace());
  CHECK(a.passed);
  CHECK(a.bytes() == b.bytes());
  CHECK(a.final_state == b.final_state);
}

TEST_CASE("a broken fixture fails the replay at the step that depends on it") {
  TempDir dir;
  fs::copy(duet::test::barcelona_fixtures(), dir.path, fs::copy_options::recursive);
  std::string mock = read_file(dir.path / "service_mock.json");
  const auto at = mock.find("Flight AB123");
  REQUIRE(at != std::string::npos);
  mock.replace(at, 12, "Flight ZZ999");
  write_file(dir.path / "service_mock.json", mock);

  const auto report = replay_files(duet::test::barcelona_trace(), dir.path, duet::test::catalog_dir());
  CHECK_FALSE(report.passed);
  const Json* first = nullptr;
  for (const auto& s : report.doc["steps"]) {
    if (!s["ok"].get<bool>()) {
      first = &s;
      break;
    }
  }
  REQUIRE(first);
  CHECK((*first)["index"] == 21);
  CHECK((*first)["op"] == "assert");
  CHECK((*first)["message"].get<std::string>().find("Flight AB123") != std::string::npos);
}

TEST_CASE("traces are validated on load") {
  CHECK(code_of([] { Trace::from_json(Json::object()); }) == ErrorCode::malformed_document);
  CHECK(code_of([] { Trace::from_json(Json{{"meta", {{"goal", "g"}}}, {"steps", {{{"advance", "Nowhere"}}}}}); }) ==
        ErrorCode::malformed_document);
  CHECK(code_of([] {
          Trace::from_json(Json{{"meta", {{"goal", "g"}}}, {"steps", {{{"advance", "Empathize"}, {"assert", "stage_is"}}}}});
        }) == ErrorCode::malformed_document);
  const auto t = Trace::from_json(Json{{"meta", {{"goal", "g"}, {"seed", 3}}}, {"steps", {{{"advance", "empathize"}}}}});
  CHECK(t.seed == 3);
  CHECK(t.steps[0].advance == TaskStage::empathize);
  CHECK(code_of([] { Trace::load("/nonexistent/x.trace"); }) == ErrorCode::config_error);
}

TEST_CASE("unknown checks are rejected at load") {
  const Json doc{{"meta", {{"goal", kGoal}}}, {"steps", {{{"assert", "no_such_check"}}}}};
  CHECK(code_of([&] { Trace::from_json(doc); }) == ErrorCode::malformed_document);
}

TEST_CASE("a failing check fails its step and the replay") {
  const auto trace = Trace::from_json(Json{{"meta", {{"goal", kGoal}}},
                                           {"steps", {{{"assert", "stage_is"}, {"args", {{"stage", "Plan"}}}},
                                                      {{"assert", "stage_is"}, {"args", {{"stage", "Define"}}}}}}});
  Replayer r(trace, ScriptedProvider::from_directory(duet::test::barcelona_fixtures()), duet::test::shipped_catalog());
  const auto report = r.run();
  CHECK_FALSE(report.passed);
  CHECK(report.doc["steps"][0]["ok"] == false);
  CHECK(report.doc["steps"][1]["ok"] == true);
}

TEST_CASE("json_contains") {
  CHECK(json_contains(Json{{"a", 1}, {"b", {1, 2, 3}}}, Json{{"b", {3}}}));
  CHECK_FALSE(json_contains(Json{{"a", 1}}, Json{{"a", 2}}));
  CHECK(json_contains(Json::array({Json{{"x", 1}, {"y", 2}}}), Json::array({Json{{"y", 2}}})));
  CHECK_FALSE(json_contains(Json{{"a", 1}}, Json{{"c", nullptr}}));
}

// ---- config ----------------------------------------------------------------------

TEST_CASE("config files") {
  const auto c = ServiceConfig::parse(R"(
provider = scripted
fixtures = fx

[gateway]
max_attempts = 5
per_attempt_timeout_ms = 1500
repair = false

[server]
host = 0.0.0.0
port = 9000
data_dir = data

[catalog]
dir = /abs/catalog

[orchestrator]
workers = 3
quiesce_timeout_ms = 1000
)",
                                      "/base");
  CHECK(c.provider == "scripted");
  CHECK(c.fixtures == fs::path("/base/fx"));
  CHECK(c.gateway.max_attempts == 5);
  CHECK(c.gateway.per_attempt_timeout == std::chrono::milliseconds(1500));
  CHECK_FALSE(c.gateway.repair_enabled);
  CHECK(c.host == "0.0.0.0");
  CHECK(c.port == 9000);
  CHECK(c.data_dir == fs::path("/base/data"));
  CHECK(c.catalog_dir == fs::path("/abs/catalog"));
  CHECK(c.orchestrator.workers == 3);
  CHECK(c.orchestrator.quiesce_timeout == std::chrono::milliseconds(1000));

  CHECK(code_of([] { ServiceConfig::parse("provider = oracle\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { ServiceConfig::parse("[server]\nport = many\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { ServiceConfig::parse("[gateway]\nmax_attempts = 0\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { ServiceConfig::parse("provider = remote\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { ServiceConfig::load("/nonexistent/duet.ini"); }) == ErrorCode::config_error);

  const auto remote = ServiceConfig::parse("provider = remote\n[remote]\nurl = http://h:1/v1/chat/completions\nmodel = m\n");
  CHECK(remote.remote.model == "m");
  CHECK(make_provider(remote)->name() == "remote:m");
}

// ---- HTTP API ---------------------------------------------------------------------

TEST_CASE("the API drives a session") {
  DuetService service(scripted_parts());
  auto created = service.handle("POST", "/sessions", {}, Json{{"goal", kGoal}}.dump());
  CHECK(created.status == 201);
  const std::string id = created.body["sessionId"];
  CHECK(created.body["stage"] == "Define");
  service.orchestrator().quiesce(id);

  auto state = service.handle("GET", "/sessions/" + id + "/state", {}, "");
  REQUIRE(state.status == 200);
  CHECK(state.body["stage"] == "Define");
  bool trip_type = false;
  for (const auto& c : state.body["components"]["page-trip_type"]) {
    if (c["componentId"] == "field:trip_type" && c["kind"] == "selection") trip_type = true;
  }
  CHECK(trip_type);

  const auto version = state.body["interfaceVersion"].get<std::int64_t>();
  auto same = service.handle("GET", "/sessions/" + id + "/state", {{"since", std::to_string(version)}}, "");
  CHECK(same.body["unchanged"] == true);

  auto act = service.handle("POST", "/sessions/" + id + "/actions", {},
                            Json{{"kind", "select"},
                                 {"target", {{"pageStateId", "page-trip_type"}, {"componentId", "field:trip_type"}, {"valueKey", "trip_type"}}},
                                 {"payload", {{"valueKey", "trip_type"}, {"value", "Family Vacation"}}}}
                                .dump());
  CHECK(act.status == 200);
  CHECK(act.body["loopsScheduled"] == Json::array({"task", "interface"}));
  service.orchestrator().quiesce(id);
  auto newer = service.handle("GET", "/sessions/" + id + "/state", {{"since", std::to_string(version)}}, "");
  CHECK_FALSE(newer.body.contains("unchanged"));
  CHECK(newer.body["interfaceVersion"].get<std::int64_t>() > version);

  auto hist = service.handle("GET", "/sessions/" + id + "/history", {{"since", "1"}}, "");
  CHECK(hist.body["records"][0]["seq"] == 2);
  CHECK(hist.body["lastSeq"] == hist.body["records"].back()["seq"]);

  auto stage = service.handle("POST", "/sessions/" + id + "/stage", {}, R"({"target": "Empathize"})");
  CHECK(stage.body["stage"] == "Empathize");
  auto status = service.handle("GET", "/status", {}, "");
  CHECK(status.body["sessions"] == 1);
  CHECK(status.body["provider"] == "scripted");
}

TEST_CASE("API errors map to status codes") {
  DuetService service(scripted_parts());
  const std::string id = service.handle("POST", "/sessions", {}, Json{{"goal", kGoal}}.dump()).body["sessionId"];
  service.orchestrator().quiesce(id);

  auto missing = service.handle("GET", "/sessions/nope/state", {}, "");
  CHECK(missing.status == 404);
  CHECK(missing.body["error"] == std::string(to_string(ErrorCode::unknown_session)));
  CHECK(service.handle("GET", "/nothing/here", {}, "").status == 404);

  auto dangling = service.handle("POST", "/sessions/" + id + "/actions", {},
                                 R"({"kind": "click", "target": {"pageStateId": "page-gone"}, "payload": {}})");
  CHECK(dangling.status == 409);
  auto illegal = service.handle("POST", "/sessions/" + id + "/stage", {}, R"({"target": "Duet"})");
  CHECK(illegal.status == 409);
  CHECK(illegal.body["error"] == std::string(to_string(ErrorCode::illegal_transition)));

  CHECK(service.handle("POST", "/sessions", {}, R"({"goal": "  "})").status == 400);
  CHECK(service.handle("POST", "/sessions", {}, "{nope").status == 400);
  CHECK(service.handle("POST", "/sessions/" + id + "/actions", {}, R"({"kind": "agent_commit_task"})").status == 400);
  CHECK(service.handle("GET", "/sessions/" + id + "/history", {{"since", "abc"}}, "").status == 400);
}

TEST_CASE("sessions survive a restart") {
  TempDir dir;
  std::string id;
  std::string hash;
  {
    DuetService service(scripted_parts(dir.path));
    id = service.handle("POST", "/sessions", {}, Json{{"goal", kGoal}}.dump()).body["sessionId"];
    service.orchestrator().quiesce(id);
    hash = service.context().snapshot(id).hash();
    CHECK(fs::exists(dir.path / (id + ".json")));
  }
  write_file(dir.path / "broken.json", "truncated {");
  DuetService again(scripted_parts(dir.path));
  REQUIRE(again.context().has_session(id));
  CHECK(again.context().snapshot(id).hash() == hash);
  CHECK(again.load_problems().size() == 1);
}

TEST_CASE("the HTTP server serves the API") {
  DuetService service(scripted_parts());
  HttpServer server(service);
  const int port = server.start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);

  auto created = client.Post("/sessions", Json{{"goal", kGoal}}.dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string id = Json::parse(created->body)["sessionId"];
  service.orchestrator().quiesce(id);

  auto state = client.Get("/sessions/" + id + "/state");
  REQUIRE(state);
  CHECK(state->status == 200);
  CHECK(Json::parse(state->body)["stage"] == "Define");

  auto missing = client.Get("/sessions/nope/history?since=0");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(Json::parse(missing->body).contains("error"));
  server.stop();
}

}  // TEST_SUITE
