#include "duet/llm/provider.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "httplib.h"

namespace duet {

// ---- scripted ------------------------------------------------------------------

namespace {

[[noreturn]] void bad_fixture(const std::string& source, const std::string& what) {
  throw Error(ErrorCode::config_error, "fixture " + source + ": " + what);
}

bool matches(const FixtureEntry& e, const Bindings& bindings) {
  for (const auto& [slot, needle] : e.match) {
    auto it = bindings.find(slot);
    if (it == bindings.end() || it->second.find(needle) == std::string::npos) return false;
  }
  return true;
}

}  // namespace

std::shared_ptr<ScriptedProvider> ScriptedProvider::from_json(const Json& doc,
                                                              const std::string& source) {
  auto p = std::make_shared<ScriptedProvider>();
  p->add_all(doc, source);
  return p;
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::from_directory(
    const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::config_error, "fixture directory '" + dir.string() + "' not found");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  auto p = std::make_shared<ScriptedProvider>();
  for (const auto& file : files) {
    std::ifstream in(file);
    std::stringstream buf;
    buf << in.rdbuf();
    Json doc = Json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) bad_fixture(file.filename().string(), "not valid JSON");
    p->add_all(doc, file.filename().string());
  }
  return p;
}

void ScriptedProvider::add(FixtureEntry entry) {
  if (entry.responses.empty()) bad_fixture(entry.source, "entry without responses");
  std::lock_guard lock(mutex_);
  entries_.push_back(std::move(entry));
  cursors_.push_back(0);
}

void ScriptedProvider::add_all(const Json& doc, const std::string& source) {
  if (!doc.is_object() || !doc.contains("fixtures") || !doc["fixtures"].is_array()) {
    bad_fixture(source, "expected {\"fixtures\": [...]}");
  }
  for (const auto& f : doc["fixtures"]) {
    if (!f.is_object()) bad_fixture(source, "fixture entry is not an object");
    FixtureEntry e;
    e.source = source;
    auto id = parse_template_id(f.value("template", ""));
    if (!id) bad_fixture(source, "unknown template '" + f.value("template", "") + "'");
    e.template_id = *id;
    if (f.contains("fingerprint")) e.fingerprint = f["fingerprint"].get<std::string>();
    if (f.contains("match")) {
      if (!f["match"].is_object()) bad_fixture(source, "match must be an object");
      for (auto it = f["match"].begin(); it != f["match"].end(); ++it) {
        if (!it->is_string()) bad_fixture(source, "match values must be strings");
        e.match[it.key()] = it->get<std::string>();
      }
    }
    if (!f.contains("responses") || !f["responses"].is_array()) {
      bad_fixture(source, "responses must be an array");
    }
    for (const auto& r : f["responses"]) {
      e.responses.push_back(r.is_string() ? r.get<std::string>() : r.dump());
    }
    add(std::move(e));
  }
}

std::string ScriptedProvider::complete(const CompletionRequest& request) {
  static const Bindings kNone;
  const Bindings& bindings = request.bindings ? *request.bindings : kNone;
  const std::string fingerprint = bindings_fingerprint(bindings);

  std::lock_guard lock(mutex_);
  std::optional<std::size_t> hit;
  for (std::size_t i = 0; i < entries_.size() && !hit; ++i) {
    const auto& e = entries_[i];
    if (e.template_id == request.template_id && e.fingerprint == fingerprint) hit = i;
  }
  for (std::size_t i = 0; i < entries_.size() && !hit; ++i) {
    const auto& e = entries_[i];
    if (e.template_id == request.template_id && !e.fingerprint && !e.match.empty() &&
        matches(e, bindings)) {
      hit = i;
    }
  }
  for (std::size_t i = 0; i < entries_.size() && !hit; ++i) {
    const auto& e = entries_[i];
    if (e.template_id == request.template_id && !e.fingerprint && e.match.empty()) hit = i;
  }
  if (!hit) {
    throw Error(ErrorCode::missing_fixture,
                "no fixture for " + std::string(to_string(request.template_id)) + "/" + fingerprint,
                Json{{"template", std::string(to_string(request.template_id))},
                     {"fingerprint", fingerprint}});
  }
  auto& cursor = cursors_[*hit];
  const auto& responses = entries_[*hit].responses;
  const std::size_t index = std::min(cursor, responses.size() - 1);
  if (cursor < responses.size()) ++cursor;
  calls_.push_back({request.template_id, fingerprint, *hit, index});
  return responses[index];
}

std::vector<ScriptedProvider::Call> ScriptedProvider::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t ScriptedProvider::entry_count() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void ScriptedProvider::rewind() {
  std::lock_guard lock(mutex_);
  std::fill(cursors_.begin(), cursors_.end(), 0);
  calls_.clear();
}

// ---- remote --------------------------------------------------------------------

RemoteProvider::RemoteProvider(RemoteConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.url, m, url)) {
    throw Error(ErrorCode::config_error, "remote.url '" + config_.url + "' is not an http(s) URL");
  }
  origin_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  if (config_.model.empty()) throw Error(ErrorCode::config_error, "remote.model is empty");
}

std::string RemoteProvider::complete(const CompletionRequest& request) {
  httplib::Client client(origin_);
  const auto timeout = std::min(config_.timeout, request.params.timeout);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);
  Json body{{"model", config_.model},
            {"messages", Json::array({Json{{"role", "user"}, {"content", request.prompt}}})},
            {"temperature", request.params.temperature},
            {"seed", request.params.seed}};

  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::timeout, "remote call timed out: " + httplib::to_string(err));
    }
    throw Error(ErrorCode::provider_unreachable, "remote call failed: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::provider_unreachable, "remote returned HTTP " + std::to_string(res->status),
                Json{{"status", res->status}});
  }
  Json reply = Json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
      reply["choices"].empty()) {
    throw Error(ErrorCode::provider_unreachable, "remote reply is not a chat completion");
  }
  const Json& message = reply["choices"][0].value("message", Json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    throw Error(ErrorCode::provider_unreachable, "remote reply has no message content");
  }
  return message["content"].get<std::string>();
}

}  // namespace duet
