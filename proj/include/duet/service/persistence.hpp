#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "duet/context/manager.hpp"

namespace duet {

// Version of the shipped schema bundle. Persisted sessions carry it and a
// mismatch refuses to load; there are no migrations.
inline constexpr std::string_view kSchemaBundleVersion = "1";

struct PersistedSession {
  std::string session_id;
  Json session;  // canonical ContextSnapshot serialization (full history)
  std::string schema_version;
  std::int64_t saved_at = 0;

  Json to_json() const;
};

// Full snapshot of a session. Throws unknown_session.
PersistedSession save_session(const ContextManager& context, const std::string& session_id,
                              std::int64_t saved_at);
std::string serialize(const PersistedSession& persisted);  // canonical bytes

// Throws corrupt_persisted_document for unreadable bytes and
// schema_version_mismatch for documents from another bundle version.
PersistedSession parse_persisted_session(std::string_view bytes);

// Installs the session; returns its id. Throws session_exists.
std::string load_session(ContextManager& context, const PersistedSession& persisted);

// One file per session, "<data_dir>/<sessionId>.json", written atomically.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  std::filesystem::path path_for(const std::string& session_id) const;
  void save(const ContextManager& context, const std::string& session_id, std::int64_t saved_at);
  // Loads every session file; problems are returned, not thrown.
  std::vector<std::string> load_all(ContextManager& context, std::vector<std::string>* problems = nullptr);

 private:
  std::filesystem::path dir_;
};

}  // namespace duet
