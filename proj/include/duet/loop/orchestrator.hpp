#pragma once

// The bidirectional context loop: user actions are classified, task loops
// revise the plan and are always followed by an interface loop, and each
// session's loops run strictly one after another.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "duet/agents/env.hpp"
#include "duet/context/manager.hpp"

namespace duet {

enum class Classification { needs_task_loop, needs_interface_loop, no_loop };
enum class TriggerCause { user_action, stage_advance, task_committed, bootstrap };
enum class LoopKind { task, interface };
enum class LoopOutcome { committed, stale_retry, failed };

std::string_view to_string(Classification c) noexcept;
std::string_view to_string(TriggerCause c) noexcept;
std::string_view to_string(LoopKind k) noexcept;
std::string_view to_string(LoopOutcome o) noexcept;

// Decision table, a pure function of the record and the component it
// targets (null when it targets a page or nothing):
//   input, select, slide, pick_date, reorder, confirm -> task loop
//   click on an actionButton                          -> task loop
//   favorite, navigate, other clicks                  -> interface loop when
//       the component shows data (cardView, dashboard, price), else none
//   agent records and stage changes                   -> none
Classification classify(const ActionRecord& action, const Component* target);

struct LoopTrigger {
  TriggerCause cause = TriggerCause::user_action;
  std::optional<std::int64_t> seq;
  Classification classification = Classification::no_loop;

  Json to_json() const;
};

struct LoopRun {
  LoopKind loop = LoopKind::task;
  std::int64_t base_task_version = 0;
  std::int64_t base_interface_version = 0;
  LoopOutcome outcome = LoopOutcome::committed;
  std::optional<std::int64_t> committed_version;
  std::string reason;   // error code name for stale_retry and failed
  Json detail = nullptr;  // error detail (attempt traces, issues)

  Json to_json() const;
};

// How a trigger was handled: "run" starts a loop, "coalesced" joined the run
// of an earlier trigger, "no_loop" needed nothing.
struct TriggerLogEntry {
  LoopTrigger trigger;
  std::string disposition;

  Json to_json() const;
};

struct OrchestratorOptions {
  bool synchronous = false;  // run loops on the calling thread (replay, tests)
  std::size_t workers = 4;
  std::chrono::milliseconds quiesce_timeout{60'000};
  int max_attempts = 3;  // per loop and trigger: 1 try plus 2 stale retries
};

struct SubmitResult {
  std::int64_t seq = 0;
  Classification classification = Classification::no_loop;
  std::vector<std::string> loops_scheduled;  // "task", "interface"
};

class Orchestrator {
 public:
  Orchestrator(ContextManager& context, std::shared_ptr<const Gateway> gateway,
               std::shared_ptr<const Catalog> catalog, OrchestratorOptions options = {});
  ~Orchestrator();

  Orchestrator(const Orchestrator&) = delete;
  Orchestrator& operator=(const Orchestrator&) = delete;

  // Creates the session and schedules the bootstrap task and interface loops.
  std::string create_session(const std::string& goal);

  // Records the action, classifies it and queues the trigger. Returns once
  // queued (or, in synchronous mode, once the loops have run).
  SubmitResult submit_action(const std::string& session_id, const ActionDraft& draft);

  // Moves the stage and schedules a task loop for the new stage.
  TaskStage advance_stage(const std::string& session_id, TaskStage target,
                          Actor actor = Actor::user);

  // Queues a trigger for a session.
  void enqueue(const std::string& session_id, const LoopTrigger& trigger);

  // Runs the loops for one trigger on the calling thread, bypassing the
  // queue. Callers must not run two of these for one session at once.
  std::vector<LoopRun> on_trigger(const std::string& session_id, const LoopTrigger& trigger);

  // Waits until the session has nothing queued or running; returns the
  // (taskVersion, interfaceVersion) then current. Throws quiesce_timeout.
  std::pair<std::int64_t, std::int64_t> quiesce(
      const std::string& session_id, std::optional<std::chrono::milliseconds> timeout = {});

  std::vector<TriggerLogEntry> trigger_log(const std::string& session_id) const;
  std::vector<LoopRun> runs(const std::string& session_id) const;
  bool busy(const std::string& session_id) const;

  // Called on the worker thread each time a session's queue drains, before
  // quiesce() waiters wake.
  void set_idle_callback(std::function<void(const std::string&)> callback);

  ContextManager& context() noexcept { return context_; }
  const Gateway& gateway() const noexcept { return *gateway_; }
  const Catalog& catalog() const noexcept { return *catalog_; }

 private:
  struct Lane;
  struct Pool;

  std::shared_ptr<Lane> lane(const std::string& session_id) const;
  void drain(const std::string& session_id, const std::shared_ptr<Lane>& lane);
  void run_idle_callback(const std::string& session_id);
  std::vector<LoopRun> process(const std::string& session_id,
                               const std::vector<LoopTrigger>& batch);
  bool run_task_loop(const std::string& session_id, const std::vector<LoopTrigger>& batch,
                     std::vector<LoopRun>& runs);
  bool run_interface_loop(const std::string& session_id, std::vector<LoopRun>& runs);
  void record_failure(const std::string& session_id, LoopKind loop, const std::string& code,
                      const std::string& message, int attempts);

  ContextManager& context_;
  std::shared_ptr<const Gateway> gateway_;
  std::shared_ptr<const Catalog> catalog_;
  OrchestratorOptions options_;
  std::unique_ptr<Pool> pool_;

  mutable std::mutex lanes_mutex_;
  std::map<std::string, std::shared_ptr<Lane>> lanes_;
  std::function<void(const std::string&)> idle_callback_;
};

}  // namespace duet
