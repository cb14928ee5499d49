#include "duet/service/persistence.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "duet/schema/codec.hpp"

namespace duet {

Json PersistedSession::to_json() const {
  return Json{{"sessionId", session_id},
              {"session", session},
              {"schemaVersion", schema_version},
              {"savedAt", saved_at}};
}

PersistedSession save_session(const ContextManager& context, const std::string& session_id,
                              std::int64_t saved_at) {
  const ContextSnapshot snap = context.snapshot(session_id);
  return PersistedSession{snap.session_id, snap.to_json(), std::string(kSchemaBundleVersion), saved_at};
}

std::string serialize(const PersistedSession& persisted) { return canonical_dump(persisted.to_json()); }

PersistedSession parse_persisted_session(std::string_view bytes) {
  Json doc = Json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::corrupt_persisted_document, "persisted session is not a JSON object");
  }
  auto str = [&](const char* key) -> std::string {
    if (!doc.contains(key) || !doc[key].is_string()) {
      throw Error(ErrorCode::corrupt_persisted_document,
                  std::string("persisted session lacks string '") + key + "'");
    }
    return doc[key].get<std::string>();
  };
  PersistedSession p;
  p.schema_version = str("schemaVersion");
  if (p.schema_version != kSchemaBundleVersion) {
    throw Error(ErrorCode::schema_version_mismatch,
                "saved with schema bundle " + p.schema_version + ", this build uses " +
                    std::string(kSchemaBundleVersion),
                Json{{"found", p.schema_version}, {"expected", std::string(kSchemaBundleVersion)}});
  }
  p.session_id = str("sessionId");
  if (!doc.contains("session") || !doc["session"].is_object()) {
    throw Error(ErrorCode::corrupt_persisted_document, "persisted session lacks 'session'");
  }
  p.session = doc["session"];
  try {
    if (snapshot_from_json(p.session).session_id != p.session_id) {
      throw Error(ErrorCode::corrupt_persisted_document, "session id does not match its envelope");
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::corrupt_persisted_document, e.what(), e.detail());
  }
  if (doc.contains("savedAt") && doc["savedAt"].is_number_integer()) {
    p.saved_at = doc["savedAt"].get<std::int64_t>();
  }
  return p;
}

std::string load_session(ContextManager& context, const PersistedSession& persisted) {
  ContextSnapshot snap;
  try {
    snap = snapshot_from_json(persisted.session);
  } catch (const Error& e) {
    throw Error(ErrorCode::corrupt_persisted_document, e.what(), e.detail());
  }
  if (snap.session_id != persisted.session_id) {
    throw Error(ErrorCode::corrupt_persisted_document, "session id does not match its envelope");
  }
  try {
    context.restore(snap);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::session_exists) throw;
    throw Error(ErrorCode::corrupt_persisted_document, e.what(), e.detail());
  }
  return snap.session_id;
}

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::config_error, "cannot create data dir '" + dir_.string() + "'");
}

std::filesystem::path SessionStore::path_for(const std::string& session_id) const {
  return dir_ / (session_id + ".json");
}

void SessionStore::save(const ContextManager& context, const std::string& session_id,
                        std::int64_t saved_at) {
  const std::string bytes = serialize(save_session(context, session_id, saved_at));
  const auto target = path_for(session_id);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << bytes;
    if (!out) throw Error(ErrorCode::config_error, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::vector<std::string> SessionStore::load_all(ContextManager& context,
                                                std::vector<std::string>* problems) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> loaded;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      loaded.push_back(load_session(context, parse_persisted_session(buf.str())));
    } catch (const Error& e) {
      if (problems) problems->push_back(file.filename().string() + ": " + e.what());
    }
  }
  return loaded;
}

}  // namespace duet
