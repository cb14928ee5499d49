#pragma once

// HTTP/JSON surface over the engine.
//
//   POST /sessions                  {goal}            -> {sessionId, stage, interfaceVersion}
//   GET  /sessions/{id}/state?since=<interfaceVersion> -> interface or {unchanged: true}
//   POST /sessions/{id}/actions     {kind, target, payload} -> {seq, loopsScheduled}
//   POST /sessions/{id}/stage       {target}          -> {stage}
//   GET  /sessions/{id}/history?since=<seq>           -> {sessionId, lastSeq, records}
//   GET  /status                                      -> {provider, sessions, laggingSessions}
//
// Errors come back as {error, message, detail} with 400 (bad input), 404
// (unknown session), 409 (dangling target, illegal transition, stale base) or
// 500. Action posts return once the action is queued; clients poll `state`.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "duet/loop/orchestrator.hpp"
#include "duet/service/config.hpp"
#include "duet/service/persistence.hpp"

namespace duet {

struct ApiResponse {
  int status = 200;
  Json body = Json::object();
};

int http_status_for(ErrorCode code) noexcept;

struct ServiceParts {
  std::shared_ptr<CompletionProvider> provider;
  std::shared_ptr<const Catalog> catalog;
  GatewayBudget budget;
  OrchestratorOptions orchestrator;
  std::filesystem::path data_dir;  // empty: no persistence
  std::shared_ptr<Clock> clock = std::make_shared<SystemClock>();
  IdGenerator ids = random_id_generator();
};

// Request handling without sockets, so the API can be driven directly.
class DuetService {
 public:
  explicit DuetService(ServiceParts parts);
  ~DuetService();

  DuetService(const DuetService&) = delete;
  DuetService& operator=(const DuetService&) = delete;

  // Routes a request. `query` holds decoded query parameters.
  ApiResponse handle(const std::string& method, const std::string& path,
                     const std::map<std::string, std::string>& query, const std::string& body);

  ApiResponse create_session(const Json& body);
  ApiResponse state(const std::string& session_id, std::optional<std::int64_t> since);
  ApiResponse post_action(const std::string& session_id, const Json& body);
  ApiResponse post_stage(const std::string& session_id, const Json& body);
  ApiResponse history(const std::string& session_id, std::int64_t since);
  ApiResponse status();

  // Problems met while loading persisted sessions at startup.
  const std::vector<std::string>& load_problems() const noexcept { return load_problems_; }

  ContextManager& context() noexcept { return *context_; }
  Orchestrator& orchestrator() noexcept { return *orchestrator_; }

 private:
  ServiceParts parts_;
  std::unique_ptr<ContextManager> context_;
  std::unique_ptr<Orchestrator> orchestrator_;
  std::unique_ptr<SessionStore> store_;
  std::vector<std::string> load_problems_;
};

// Builds a service from a config file's settings.
std::unique_ptr<DuetService> make_service(const ServiceConfig& config);

// Serves a DuetService over HTTP on a background thread.
class HttpServer {
 public:
  explicit HttpServer(DuetService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and starts serving; port 0 picks a free port. Returns the bound
  // port. Throws config_error if binding fails.
  int start(const std::string& host, int port);
  // Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace duet
