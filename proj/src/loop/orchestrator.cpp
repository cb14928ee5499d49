#include "duet/loop/orchestrator.hpp"

#include <condition_variable>
#include <deque>
#include <limits>

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>

#include "duet/agents/interface_agent.hpp"
#include "duet/agents/service_agent.hpp"
#include "duet/agents/task_agent.hpp"
#include "duet/schema/codec.hpp"

namespace duet {

struct Orchestrator::Lane {
  std::mutex mutex;
  std::condition_variable idle;
  std::deque<LoopTrigger> pending;
  bool running = false;
  std::vector<TriggerLogEntry> log;
  std::vector<LoopRun> runs;
};

struct Orchestrator::Pool {
  explicit Pool(std::size_t n) : pool(n) {}
  boost::asio::thread_pool pool;
};

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::needs_task_loop: return "needs_task_loop";
    case Classification::needs_interface_loop: return "needs_interface_loop";
    case Classification::no_loop: return "no_loop";
  }
  return "no_loop";
}

std::string_view to_string(TriggerCause c) noexcept {
  switch (c) {
    case TriggerCause::user_action: return "user_action";
    case TriggerCause::stage_advance: return "stage_advance";
    case TriggerCause::task_committed: return "task_committed";
    case TriggerCause::bootstrap: return "bootstrap";
  }
  return "user_action";
}

std::string_view to_string(LoopKind k) noexcept { return k == LoopKind::task ? "task" : "interface"; }

std::string_view to_string(LoopOutcome o) noexcept {
  switch (o) {
    case LoopOutcome::committed: return "committed";
    case LoopOutcome::stale_retry: return "stale_retry";
    case LoopOutcome::failed: return "failed";
  }
  return "failed";
}

Classification classify(const ActionRecord& action, const Component* target) {
  const bool shows_data = target && (target->kind() == "cardView" || target->kind() == "dashboard" ||
                                     target->kind() == "price");
  switch (action.kind) {
    case ActionKind::input:
    case ActionKind::select:
    case ActionKind::slide:
    case ActionKind::pick_date:
    case ActionKind::reorder:
    case ActionKind::confirm:
      return Classification::needs_task_loop;
    case ActionKind::click:
      if (target && target->kind() == "actionButton") return Classification::needs_task_loop;
      [[fallthrough]];
    case ActionKind::favorite:
    case ActionKind::navigate:
      return shows_data ? Classification::needs_interface_loop : Classification::no_loop;
    default:
      return Classification::no_loop;
  }
}

Json LoopTrigger::to_json() const {
  return Json{{"cause", std::string(duet::to_string(cause))},
              {"seq", seq ? Json(*seq) : Json(nullptr)},
              {"classification", std::string(duet::to_string(classification))}};
}

Json LoopRun::to_json() const {
  Json j{{"loop", std::string(duet::to_string(loop))},
         {"baseTaskVersion", base_task_version},
         {"baseInterfaceVersion", base_interface_version},
         {"outcome", std::string(duet::to_string(outcome))}};
  if (committed_version) j["committedVersion"] = *committed_version;
  if (!reason.empty()) j["reason"] = reason;
  return j;
}

Json TriggerLogEntry::to_json() const {
  Json j = trigger.to_json();
  j["disposition"] = disposition;
  return j;
}

Orchestrator::Orchestrator(ContextManager& context, std::shared_ptr<const Gateway> gateway,
                           std::shared_ptr<const Catalog> catalog, OrchestratorOptions options)
    : context_(context),
      gateway_(std::move(gateway)),
      catalog_(std::move(catalog)),
      options_(options) {
  if (!gateway_ || !catalog_) throw Error(ErrorCode::config_error, "orchestrator needs a gateway and a catalog");
  if (options_.max_attempts < 1) options_.max_attempts = 1;
  if (!options_.synchronous) pool_ = std::make_unique<Pool>(std::max<std::size_t>(1, options_.workers));
}

Orchestrator::~Orchestrator() {
  if (pool_) pool_->pool.join();
}

void Orchestrator::set_idle_callback(std::function<void(const std::string&)> callback) {
  std::lock_guard lock(lanes_mutex_);
  idle_callback_ = std::move(callback);
}

std::shared_ptr<Orchestrator::Lane> Orchestrator::lane(const std::string& session_id) const {
  std::lock_guard lock(lanes_mutex_);
  auto it = lanes_.find(session_id);
  if (it != lanes_.end()) return it->second;
  auto& self = const_cast<Orchestrator&>(*this);
  return self.lanes_[session_id] = std::make_shared<Lane>();
}

std::string Orchestrator::create_session(const std::string& goal) {
  const auto id = context_.create_session(goal);
  enqueue(id, LoopTrigger{TriggerCause::bootstrap, std::nullopt, Classification::needs_task_loop});
  return id;
}

SubmitResult Orchestrator::submit_action(const std::string& session_id, const ActionDraft& draft) {
  const auto seq = context_.record_action(session_id, draft);
  // A window starting at this record is enough to classify it.
  const auto snap = context_.snapshot(session_id, seq - 1);
  const ActionRecord* record = nullptr;
  for (const auto& r : snap.history) {
    if (r.seq == seq) record = &r;
  }
  const Component* target = nullptr;
  if (record && record->target && record->target->component_id) {
    target = snap.ui.find_component(record->target->page_state_id, *record->target->component_id);
  }
  SubmitResult out;
  out.seq = seq;
  out.classification = record ? classify(*record, target) : Classification::no_loop;
  if (out.classification == Classification::needs_task_loop) out.loops_scheduled = {"task", "interface"};
  if (out.classification == Classification::needs_interface_loop) out.loops_scheduled = {"interface"};
  enqueue(session_id, LoopTrigger{TriggerCause::user_action, seq, out.classification});
  return out;
}

TaskStage Orchestrator::advance_stage(const std::string& session_id, TaskStage target, Actor actor) {
  const auto stage = context_.advance_stage(session_id, target, actor);
  const auto seq = context_.snapshot(session_id, std::numeric_limits<std::int64_t>::max()).last_seq;
  enqueue(session_id, LoopTrigger{TriggerCause::stage_advance, seq, Classification::needs_task_loop});
  return stage;
}

void Orchestrator::enqueue(const std::string& session_id, const LoopTrigger& trigger) {
  auto l = lane(session_id);
  bool start = false;
  {
    std::lock_guard lock(l->mutex);
    l->pending.push_back(trigger);
    if (!l->running) {
      l->running = true;
      start = true;
    }
  }
  if (!start) return;
  if (options_.synchronous) {
    drain(session_id, l);
  } else {
    boost::asio::post(pool_->pool, [this, session_id, l] { drain(session_id, l); });
  }
}

void Orchestrator::drain(const std::string& session_id, const std::shared_ptr<Lane>& l) {
  bool drained = false;  // the callback already ran for the current quiet spell
  for (;;) {
    std::vector<LoopTrigger> batch;
    {
      std::lock_guard lock(l->mutex);
      while (!l->pending.empty() && l->pending.front().classification == Classification::no_loop) {
        l->log.push_back({l->pending.front(), "no_loop"});
        l->pending.pop_front();
      }
      if (l->pending.empty() && drained) {
        l->running = false;
        l->idle.notify_all();
        return;
      }
      // Consecutive triggers of the same class share one run.
      if (!l->pending.empty()) {
        const auto cls = l->pending.front().classification;
        while (!l->pending.empty() && l->pending.front().classification == cls) {
          l->log.push_back({l->pending.front(), batch.empty() ? "run" : "coalesced"});
          batch.push_back(l->pending.front());
          l->pending.pop_front();
        }
      }
    }
    if (batch.empty()) {
      // Still marked running, so quiesce() waits for the callback too.
      run_idle_callback(session_id);
      drained = true;
      continue;
    }
    drained = false;
    auto runs = process(session_id, batch);
    std::lock_guard lock(l->mutex);
    l->runs.insert(l->runs.end(), runs.begin(), runs.end());
  }
}

void Orchestrator::run_idle_callback(const std::string& session_id) {
  std::function<void(const std::string&)> callback;
  {
    std::lock_guard lock(lanes_mutex_);
    callback = idle_callback_;
  }
  if (!callback) return;
  try {
    callback(session_id);
  } catch (...) {
    // persistence problems must not take the worker down
  }
}

std::vector<LoopRun> Orchestrator::on_trigger(const std::string& session_id,
                                              const LoopTrigger& trigger) {
  return process(session_id, {trigger});
}

std::vector<LoopRun> Orchestrator::process(const std::string& session_id,
                                           const std::vector<LoopTrigger>& batch) {
  std::vector<LoopRun> runs;
  if (batch.empty() || !context_.has_session(session_id)) return runs;
  const auto cls = batch.front().classification;
  if (cls == Classification::needs_task_loop) {
    if (run_task_loop(session_id, batch, runs)) run_interface_loop(session_id, runs);
  } else if (cls == Classification::needs_interface_loop) {
    run_interface_loop(session_id, runs);
  }
  return runs;
}

namespace {

// Subtask refinements requested since the last plan commit, in seq order.
std::vector<std::pair<std::string, std::string>> refine_requests(const std::vector<ActionRecord>& window) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& r : window) {
    if (r.actor != Actor::user || r.kind != ActionKind::click || !r.payload.is_object()) continue;
    const bool refine = r.payload.value("actionId", "") == "refine_subtask" ||
                        (r.target && r.target->component_id == "action:refine_subtask");
    if (!refine || !r.payload.contains("subtask_id") || !r.payload["subtask_id"].is_string()) continue;
    out.emplace_back(r.payload["subtask_id"].get<std::string>(), r.payload.value("instruction", ""));
  }
  return out;
}

}  // namespace

bool Orchestrator::run_task_loop(const std::string& session_id,
                                 const std::vector<LoopTrigger>& batch,
                                 std::vector<LoopRun>& runs) {
  const AgentEnv env{*gateway_, *catalog_};
  Json triggers = Json::array();
  for (const auto& t : batch) triggers.push_back(t.to_json());

  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    const ContextSnapshot snap = context_.snapshot(session_id);
    LoopRun run;
    run.loop = LoopKind::task;
    run.base_task_version = snap.task_version;
    run.base_interface_version = snap.interface_version;
    try {
      TaskProposal proposal = task_agent_step(snap, env);
      for (const auto& [subtask_id, instruction] : refine_requests(intent_window(snap.history))) {
        Subtask refined = subtask_refine(proposal.plan, subtask_id, instruction, env);
        for (auto& s : proposal.plan.subtasks) {
          if (s.subtask_id == subtask_id) s = refined;
        }
      }
      ServiceRefresh refresh =
          refresh_service_data(snap.task, proposal.plan, snap.stage, snap.goal, env);
      TaskState next{std::move(proposal.plan), std::move(refresh.service_data)};
      Json annotations{{"intents", to_json(proposal.signals)}, {"triggers", triggers}};
      run.committed_version = context_.commit_task(session_id, next, snap.task_version, annotations);
      for (const auto& record : refresh.records) context_.record_action(session_id, record);
      run.outcome = LoopOutcome::committed;
      runs.push_back(std::move(run));
      return true;
    } catch (const Error& e) {
      run.reason = std::string(to_string(e.code()));
      run.detail = e.detail();
      if (e.code() == ErrorCode::stale_base && attempt < options_.max_attempts) {
        run.outcome = LoopOutcome::stale_retry;
        runs.push_back(std::move(run));
        continue;
      }
      run.outcome = LoopOutcome::failed;
      runs.push_back(std::move(run));
      record_failure(session_id, LoopKind::task, std::string(to_string(e.code())), e.what(), attempt);
      return false;
    } catch (const std::exception& e) {
      run.outcome = LoopOutcome::failed;
      run.reason = "InternalError";
      runs.push_back(std::move(run));
      record_failure(session_id, LoopKind::task, "InternalError", e.what(), attempt);
      return false;
    }
  }
  return false;
}

bool Orchestrator::run_interface_loop(const std::string& session_id, std::vector<LoopRun>& runs) {
  const AgentEnv env{*gateway_, *catalog_};
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    const ContextSnapshot snap = context_.snapshot(session_id);
    LoopRun run;
    run.loop = LoopKind::interface;
    run.base_task_version = snap.task_version;
    run.base_interface_version = snap.interface_version;
    try {
      InterfaceProposal proposal = interface_agent_step(snap, env);
      run.committed_version = context_.commit_interface(session_id, proposal.ui, snap.task_version,
                                                        snap.interface_version);
      run.outcome = LoopOutcome::committed;
      runs.push_back(std::move(run));
      return true;
    } catch (const Error& e) {
      run.reason = std::string(to_string(e.code()));
      run.detail = e.detail();
      if (e.code() == ErrorCode::stale_base && attempt < options_.max_attempts) {
        run.outcome = LoopOutcome::stale_retry;
        runs.push_back(std::move(run));
        continue;
      }
      run.outcome = LoopOutcome::failed;
      runs.push_back(std::move(run));
      record_failure(session_id, LoopKind::interface, std::string(to_string(e.code())), e.what(),
                     attempt);
      return false;
    } catch (const std::exception& e) {
      run.outcome = LoopOutcome::failed;
      run.reason = "InternalError";
      runs.push_back(std::move(run));
      record_failure(session_id, LoopKind::interface, "InternalError", e.what(), attempt);
      return false;
    }
  }
  return false;
}

void Orchestrator::record_failure(const std::string& session_id, LoopKind loop,
                                  const std::string& code, const std::string& message,
                                  int attempts) {
  try {
    context_.record_action(session_id,
                           ActionDraft{Actor::agent, ActionKind::agent_loop_failed, std::nullopt,
                                       Json{{"loop", std::string(to_string(loop))},
                                            {"error", code},
                                            {"message", message},
                                            {"attempts", attempts}}});
  } catch (const Error&) {
    // the session was dropped mid-run; nothing left to annotate
  }
}

std::pair<std::int64_t, std::int64_t> Orchestrator::quiesce(
    const std::string& session_id, std::optional<std::chrono::milliseconds> timeout) {
  if (!context_.has_session(session_id)) {
    throw Error(ErrorCode::unknown_session, "no session '" + session_id + "'");
  }
  auto l = lane(session_id);
  {
    std::unique_lock lock(l->mutex);
    const auto limit = timeout.value_or(options_.quiesce_timeout);
    if (!l->idle.wait_for(lock, limit, [&] { return !l->running && l->pending.empty(); })) {
      throw Error(ErrorCode::quiesce_timeout,
                  "session '" + session_id + "' still busy after " + std::to_string(limit.count()) + " ms");
    }
  }
  const auto snap = context_.snapshot(session_id, std::numeric_limits<std::int64_t>::max());
  return {snap.task_version, snap.interface_version};
}

std::vector<TriggerLogEntry> Orchestrator::trigger_log(const std::string& session_id) const {
  auto l = lane(session_id);
  std::lock_guard lock(l->mutex);
  return l->log;
}

std::vector<LoopRun> Orchestrator::runs(const std::string& session_id) const {
  auto l = lane(session_id);
  std::lock_guard lock(l->mutex);
  return l->runs;
}

bool Orchestrator::busy(const std::string& session_id) const {
  auto l = lane(session_id);
  std::lock_guard lock(l->mutex);
  return l->running || !l->pending.empty();
}

}  // namespace duet
