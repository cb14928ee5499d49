#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "duet/context/clock.hpp"
#include "duet/context/state.hpp"
#include "duet/schema/duality.hpp"

namespace duet {

inline constexpr std::size_t kRetainedVersions = 8;

struct SessionSummary {
  std::string session_id;
  TaskStage stage;
  std::int64_t task_version;
  std::int64_t interface_version;
  bool interface_lags;
};

// Holds every session's stage, descriptions and action history. Mutations on
// one session are serialized by a per-session mutex; distinct sessions never
// contend beyond the registry lookup.
class ContextManager {
 public:
  explicit ContextManager(std::shared_ptr<Clock> clock = std::make_shared<SystemClock>(),
                          IdGenerator ids = random_id_generator());
  ~ContextManager();

  ContextManager(const ContextManager&) = delete;
  ContextManager& operator=(const ContextManager&) = delete;

  // Returns the new session id. The goal is recorded as seq 1.
  std::string create_session(const std::string& goal);

  // Commits a user action, or an agent search/recommend/failure record.
  // Commit and stage_change kinds are written only by the operations below.
  std::int64_t record_action(const std::string& session_id, const ActionDraft& draft);

  ContextSnapshot snapshot(const std::string& session_id,
                           std::optional<std::int64_t> since_seq = std::nullopt) const;
  std::vector<ActionRecord> history(const std::string& session_id, std::int64_t since_seq = 0) const;

  // `annotations` (e.g. the intents and trigger behind the commit) are
  // merged into the history record's payload.
  std::int64_t commit_task(const std::string& session_id, const TaskState& task,
                           std::int64_t base_task_version,
                           const Json& annotations = Json::object());
  // `base_task_version` is the task version the interface was derived from;
  // it must still be current, as must `base_interface_version`.
  std::int64_t commit_interface(const std::string& session_id, const InterfaceDescription& ui,
                                std::int64_t base_task_version,
                                std::int64_t base_interface_version);

  TaskStage advance_stage(const std::string& session_id, TaskStage target,
                          Actor actor = Actor::user);

  std::vector<Versioned<TaskState>> task_versions(const std::string& session_id) const;
  std::vector<Versioned<InterfaceDescription>> interface_versions(
      const std::string& session_id) const;

  bool has_session(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;  // sorted
  std::vector<SessionSummary> summaries() const;

  // Installs a previously saved session. Throws session_exists on id clash.
  void restore(const ContextSnapshot& full);
  void drop(const std::string& session_id);

  Clock& clock() noexcept { return *clock_; }

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& session_id) const;

  std::shared_ptr<Clock> clock_;
  IdGenerator ids_;
  mutable std::shared_mutex registry_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
};

// Stage policy: forward only to the immediate successor, backward anywhere.
bool is_legal_transition(TaskStage from, TaskStage to) noexcept;

}  // namespace duet
