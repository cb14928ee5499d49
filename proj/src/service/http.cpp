#include "duet/service/http.hpp"

#include <charconv>
#include <iostream>
#include <thread>

#include "duet/schema/codec.hpp"
#include "httplib.h"

namespace duet {

namespace {

ApiResponse error_response(const Error& e) { return {http_status_for(e.code()), e.to_json()}; }

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json doc = Json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::malformed_document, "request body is not JSON");
  return doc;
}

std::int64_t parse_int(const std::string& text, const char* name) {
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::malformed_document, std::string("query parameter '") + name + "' is not an integer");
  }
  return v;
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    auto j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    out.push_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

ApiResponse not_found(const std::string& method, const std::string& path) {
  return {404, Json{{"error", "NotFound"}, {"message", "no route " + method + " " + path}, {"detail", Json::object()}}};
}

}  // namespace

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::empty_goal:
    case ErrorCode::malformed_document:
    case ErrorCode::validation_failed:
      return 400;
    case ErrorCode::unknown_session: return 404;
    case ErrorCode::dangling_target:
    case ErrorCode::illegal_transition:
    case ErrorCode::stale_base:
    case ErrorCode::session_exists:
      return 409;
    default: return 500;
  }
}

// ---- service ---------------------------------------------------------------------

DuetService::DuetService(ServiceParts parts) : parts_(std::move(parts)) {
  if (!parts_.provider || !parts_.catalog) {
    throw Error(ErrorCode::config_error, "service needs a provider and a catalog");
  }
  context_ = std::make_unique<ContextManager>(parts_.clock, parts_.ids);
  if (!parts_.data_dir.empty()) {
    store_ = std::make_unique<SessionStore>(parts_.data_dir);
    store_->load_all(*context_, &load_problems_);
  }
  auto gateway = std::make_shared<Gateway>(parts_.provider, parts_.budget);
  orchestrator_ = std::make_unique<Orchestrator>(*context_, gateway, parts_.catalog, parts_.orchestrator);
  if (store_) {
    orchestrator_->set_idle_callback([this](const std::string& id) {
      try {
        store_->save(*context_, id, parts_.clock->now_ms());
      } catch (const std::exception& e) {
        std::cerr << "duet: saving session " << id << " failed: " << e.what() << "\n";
      }
    });
  }
}

DuetService::~DuetService() {
  // Workers may still call back into the store; stop them first.
  orchestrator_.reset();
}

ApiResponse DuetService::create_session(const Json& body) {
  if (!body.is_object() || !body.contains("goal") || !body["goal"].is_string()) {
    throw Error(ErrorCode::empty_goal, "body must be {\"goal\": \"...\"}");
  }
  const auto id = orchestrator_->create_session(body["goal"].get<std::string>());
  const auto snap = context_->snapshot(id, std::numeric_limits<std::int64_t>::max());
  return {201, Json{{"sessionId", id},
                    {"stage", std::string(to_string(snap.stage))},
                    {"interfaceVersion", snap.interface_version}}};
}

ApiResponse DuetService::state(const std::string& session_id, std::optional<std::int64_t> since) {
  const auto snap = context_->snapshot(session_id, std::numeric_limits<std::int64_t>::max());
  if (since && snap.interface_version <= *since) {
    return {200, Json{{"unchanged", true}, {"interfaceVersion", snap.interface_version}}};
  }
  Json body = to_json(snap.ui);
  body["sessionId"] = session_id;
  body["stage"] = std::string(to_string(snap.stage));
  body["taskVersion"] = snap.task_version;
  body["interfaceVersion"] = snap.interface_version;
  body["pending"] = orchestrator_->busy(session_id) || snap.interface_lags();
  return {200, body};
}

ApiResponse DuetService::post_action(const std::string& session_id, const Json& body) {
  if (!context_->has_session(session_id)) {
    throw Error(ErrorCode::unknown_session, "no session '" + session_id + "'");
  }
  auto draft = validate_action_draft(body);
  if (!draft.ok()) {
    throw Error(ErrorCode::malformed_document, describe(draft.errors),
                Json{{"issues", to_json(draft.errors)}});
  }
  if (draft.value->actor != Actor::user) {
    throw Error(ErrorCode::malformed_document, "only user actions can be posted");
  }
  const auto result = orchestrator_->submit_action(session_id, *draft.value);
  return {200, Json{{"seq", result.seq},
                    {"classification", std::string(to_string(result.classification))},
                    {"loopsScheduled", result.loops_scheduled}}};
}

ApiResponse DuetService::post_stage(const std::string& session_id, const Json& body) {
  if (!context_->has_session(session_id)) {
    throw Error(ErrorCode::unknown_session, "no session '" + session_id + "'");
  }
  std::optional<TaskStage> target;
  if (body.is_object() && body.contains("target") && body["target"].is_string()) {
    target = parse_task_stage(body["target"].get<std::string>());
  }
  if (!target) throw Error(ErrorCode::malformed_document, "body must be {\"target\": \"<stage>\"}");
  const auto stage = orchestrator_->advance_stage(session_id, *target);
  return {200, Json{{"stage", std::string(to_string(stage))}}};
}

ApiResponse DuetService::history(const std::string& session_id, std::int64_t since) {
  const auto snap = context_->snapshot(session_id, since);
  Json records = Json::array();
  for (const auto& r : snap.history) records.push_back(to_json(r));
  return {200, Json{{"sessionId", session_id}, {"since", since}, {"lastSeq", snap.last_seq}, {"records", records}}};
}

ApiResponse DuetService::status() {
  Json lagging = Json::array();
  Json busy = Json::array();
  const auto summaries = context_->summaries();
  for (const auto& s : summaries) {
    if (s.interface_lags) lagging.push_back(s.session_id);
    if (orchestrator_->busy(s.session_id)) busy.push_back(s.session_id);
  }
  return {200, Json{{"provider", parts_.provider->name()},
                    {"sessions", summaries.size()},
                    {"laggingSessions", lagging},
                    {"busySessions", busy}}};
}

ApiResponse DuetService::handle(const std::string& method, const std::string& path,
                                const std::map<std::string, std::string>& query,
                                const std::string& body) {
  try {
    const auto parts = split_path(path);
    auto q = [&](const char* name) -> std::optional<std::int64_t> {
      auto it = query.find(name);
      if (it == query.end() || it->second.empty()) return std::nullopt;
      return parse_int(it->second, name);
    };
    if (parts.size() == 1 && parts[0] == "status" && method == "GET") return status();
    if (parts.empty() || parts[0] != "sessions") return not_found(method, path);
    if (parts.size() == 1 && method == "POST") return create_session(parse_body(body));
    if (parts.size() != 3) return not_found(method, path);
    const auto& id = parts[1];
    const auto& verb = parts[2];
    if (verb == "state" && method == "GET") return state(id, q("since"));
    if (verb == "history" && method == "GET") return history(id, q("since").value_or(0));
    if (verb == "actions" && method == "POST") return post_action(id, parse_body(body));
    if (verb == "stage" && method == "POST") return post_stage(id, parse_body(body));
    return not_found(method, path);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return {500, Json{{"error", "Internal"}, {"message", e.what()}, {"detail", Json::object()}}};
  }
}

std::unique_ptr<DuetService> make_service(const ServiceConfig& config) {
  ServiceParts parts;
  parts.provider = make_provider(config);
  parts.catalog = std::make_shared<const Catalog>(Catalog::load_directory(config.catalog_dir));
  parts.budget = config.gateway;
  parts.orchestrator = config.orchestrator;
  parts.data_dir = config.data_dir;
  return std::make_unique<DuetService>(std::move(parts));
}

// ---- http -----------------------------------------------------------------------

struct HttpServer::Impl {
  DuetService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(DuetService& s) : service(s) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query;
      for (const auto& [k, v] : req.params) query.emplace(k, v);
      const auto out = service.handle(req.method, req.path, query, req.body);
      res.status = out.status;
      res.set_content(canonical_dump(out.body), "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
  }
};

HttpServer::HttpServer(DuetService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::config_error, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::config_error, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace duet
