#pragma once

// Stage model and action-history records. These live in schema-core because
// they cross the wire: the UI posts action drafts and reads history windows.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "duet/error.hpp"

namespace duet {

enum class TaskStage { define, empathize, plan, explore, refine, duet };

inline constexpr int kStageCount = 6;

std::string_view to_string(TaskStage stage) noexcept;  // "Define", "Empathize", ...
std::optional<TaskStage> parse_task_stage(std::string_view text) noexcept;  // case-insensitive
constexpr int stage_index(TaskStage stage) noexcept { return static_cast<int>(stage); }

enum class Actor { user, agent };

std::string_view to_string(Actor actor) noexcept;
std::optional<Actor> parse_actor(std::string_view text) noexcept;

enum class ActionKind {
  input,
  select,
  click,
  slide,
  pick_date,
  reorder,
  favorite,
  confirm,
  navigate,
  agent_search,
  agent_recommend,
  agent_commit_task,
  agent_commit_interface,
  agent_loop_failed,
  stage_change,
};

std::string_view to_string(ActionKind kind) noexcept;
std::optional<ActionKind> parse_action_kind(std::string_view text) noexcept;

// Kinds a user may post through the action endpoint.
bool is_user_kind(ActionKind kind) noexcept;
// Kinds only the context manager writes (commits and stage changes).
bool is_engine_written_kind(ActionKind kind) noexcept;

struct ActionTarget {
  std::string page_state_id;
  std::optional<std::string> component_id;
  std::optional<std::string> value_key;

  bool operator==(const ActionTarget&) const = default;
};

// An action before the context manager assigns its sequence number.
struct ActionDraft {
  Actor actor = Actor::user;
  ActionKind kind = ActionKind::input;
  std::optional<ActionTarget> target;
  Json payload = Json::object();

  bool operator==(const ActionDraft&) const = default;
};

struct ActionRecord {
  std::int64_t seq = 0;
  Actor actor = Actor::user;
  ActionKind kind = ActionKind::input;
  std::optional<ActionTarget> target;
  Json payload = Json::object();
  std::int64_t at = 0;  // epoch ms

  // valueKey from the target, falling back to payload["valueKey"].
  std::optional<std::string> value_key() const;
  bool operator==(const ActionRecord&) const = default;
};

}  // namespace duet
