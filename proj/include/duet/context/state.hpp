#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "duet/schema/actions.hpp"
#include "duet/schema/types.hpp"

namespace duet {

// The task description a task loop commits: the plan plus whatever the
// service agent fetched for each subtask (subtask_id -> items).
struct TaskState {
  TaskDecomposition plan;
  std::map<std::string, std::vector<BasicItem>> service_data;

  bool operator==(const TaskState&) const = default;
};

Json to_json(const TaskState& v);
TaskState task_state_from_json(const Json& j);  // throws malformed_document

Json to_json(const InterfaceDescription& v);  // {navigation, pageStates, components}
InterfaceDescription interface_from_json(const Json& j);

template <class T>
struct Versioned {
  std::int64_t version = 0;
  T value;

  bool operator==(const Versioned&) const = default;
};

// Immutable copy of a session. Taking one never blocks writers for longer
// than the copy, and later commits do not alter it.
struct ContextSnapshot {
  std::string session_id;
  std::string goal;
  TaskStage stage = TaskStage::define;
  std::int64_t task_version = 0;
  TaskState task;
  std::int64_t interface_version = 0;
  // Task version the current interface was generated from.
  std::int64_t interface_task_version = 0;
  InterfaceDescription ui;
  std::vector<ActionRecord> history;  // full log, or the requested window
  std::int64_t last_seq = 0;          // highest committed seq, even for windows

  Json to_json() const;
  std::string hash() const;  // sha256 over the canonical serialization
  bool interface_lags() const noexcept { return interface_task_version != task_version; }
  bool operator==(const ContextSnapshot&) const = default;
};

ContextSnapshot snapshot_from_json(const Json& j);  // throws malformed_document

}  // namespace duet
