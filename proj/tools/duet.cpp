// duet: serve the HTTP API, replay traces, validate documents.
//
// Exit codes: 0 success, 2 validation or assertion failure, 3 environment
// error (unreadable files, bad config, bind failures).

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "duet/schema/codec.hpp"
#include "duet/schema/validate.hpp"
#include "duet/service/http.hpp"
#include "duet/service/replay.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 2;
constexpr int kEnvironment = 3;

duet::HttpServer* g_server = nullptr;

int exit_code_for(const duet::Error& e) {
  switch (e.code()) {
    case duet::ErrorCode::malformed_document:
    case duet::ErrorCode::validation_failed:
    case duet::ErrorCode::unknown_schema:
    case duet::ErrorCode::assertion_failed:
    case duet::ErrorCode::missing_fixture:
      return kFailed;
    default: return kEnvironment;
  }
}

int report_error(const duet::Error& e) {
  std::cerr << "duet: " << duet::to_string(e.code()) << ": " << e.what() << "\n";
  return exit_code_for(e);
}

int run_serve(const std::string& config_path) {
  auto config = duet::ServiceConfig::load(config_path);
  auto service = duet::make_service(config);
  for (const auto& p : service->load_problems()) std::cerr << "duet: skipped persisted session: " << p << "\n";
  duet::HttpServer server(*service);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "duet: serving on " << config.host << ":" << config.port << " (provider "
            << config.provider << ")\n";
  server.run(config.host, config.port);
  g_server = nullptr;
  return kOk;
}

int run_replay(const std::string& trace, const std::string& fixtures, const std::string& catalog,
               const std::string& report_path, const std::string& state_path) {
  const auto report = duet::replay_files(trace, fixtures, catalog);
  for (const auto& step : report.doc["steps"]) {
    if (step["ok"].get<bool>()) continue;
    std::cout << "step " << step["index"].get<std::size_t>() << " (" << step["op"].get<std::string>()
              << ") failed: " << step.value("message", "") << "\n";
  }
  for (auto it = report.doc["invariants"].begin(); it != report.doc["invariants"].end(); ++it) {
    if (it.value() != "ok") std::cout << "invariant " << it.key() << " violated: " << it.value().get<std::string>() << "\n";
  }
  const auto& final_state = report.doc["final"];
  std::cout << (report.passed ? "PASS" : "FAIL") << " " << report.doc["trace"].get<std::string>()
            << " stage=" << final_state["stage"].get<std::string>()
            << " hash=" << final_state["hash"].get<std::string>() << "\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw duet::Error(duet::ErrorCode::config_error, "cannot write report '" + report_path + "'");
    out << report.bytes() << "\n";
  }
  if (!state_path.empty()) {
    std::ofstream out(state_path, std::ios::binary);
    if (!out) throw duet::Error(duet::ErrorCode::config_error, "cannot write state '" + state_path + "'");
    out << report.final_state.dump(2) << "\n";
  }
  return report.passed ? kOk : kFailed;
}

int run_validate(const std::string& file, const std::string& schema) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw duet::Error(duet::ErrorCode::config_error, "cannot read '" + file + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  duet::Json doc = duet::Json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) {
    std::cout << "invalid: not JSON\n";
    return kFailed;
  }
  const auto report = duet::validate(std::string_view(schema), doc);
  if (report.ok()) {
    std::cout << "valid " << schema << "\n";
    return kOk;
  }
  std::cout << duet::canonical_dump(report.to_json()) << "\n";
  return kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-agent co-generation engine"};
  app.require_subcommand(1);

  std::string config_path;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--config", config_path, "INI config file")->required();

  std::string trace, fixtures, catalog, report_path, state_path;
  auto* replay = app.add_subcommand("replay", "Replay a trace against scripted fixtures");
  replay->add_option("trace", trace, "Trace file")->required();
  replay->add_option("--fixtures", fixtures, "Fixture directory (default: the trace's meta.fixtures)");
  replay->add_option("--catalog", catalog, "Catalog directory (default: the trace's meta.catalog)");
  replay->add_option("--report", report_path, "Write the canonical JSON report here");
  replay->add_option("--state", state_path, "Write the final session snapshot here");

  std::string file, schema;
  auto* check = app.add_subcommand("validate", "Validate a JSON document against a schema");
  check->add_option("file", file, "Document")->required();
  check->add_option("--schema", schema, "Schema id, e.g. TaskDecomposition")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kEnvironment;
  }

  try {
    if (*serve) return run_serve(config_path);
    if (*replay) return run_replay(trace, fixtures, catalog, report_path, state_path);
    return run_validate(file, schema);
  } catch (const duet::Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "duet: " << e.what() << "\n";
    return kEnvironment;
  }
}
