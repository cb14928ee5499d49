#include "duet/context/manager.hpp"

#include <algorithm>
#include <cctype>

#include "duet/schema/codec.hpp"

namespace duet {

struct ContextManager::Session {
  mutable std::mutex mutex;
  std::string id;
  std::string goal;
  TaskStage stage = TaskStage::define;
  std::deque<Versioned<TaskState>> tasks;  // back() is current
  std::deque<Versioned<InterfaceDescription>> interfaces;
  std::int64_t interface_task_version = 0;
  std::vector<ActionRecord> history;

  const Versioned<TaskState>& task() const { return tasks.back(); }
  const Versioned<InterfaceDescription>& ui() const { return interfaces.back(); }

  std::int64_t append(Actor actor, ActionKind kind, std::optional<ActionTarget> target,
                      Json payload, std::int64_t at) {
    ActionRecord r;
    r.seq = static_cast<std::int64_t>(history.size()) + 1;
    r.actor = actor;
    r.kind = kind;
    r.target = std::move(target);
    r.payload = payload.is_object() ? std::move(payload) : Json::object();
    r.at = at;
    history.push_back(std::move(r));
    return history.back().seq;
  }
};

namespace {

template <class T>
void push_version(std::deque<Versioned<T>>& versions, T value) {
  const auto next = versions.empty() ? 0 : versions.back().version + 1;
  versions.push_back({next, std::move(value)});
  while (versions.size() > kRetainedVersions) versions.pop_front();
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

void append_issues(Issues& into, const Issues& from, const std::string& prefix) {
  for (auto issue : from) {
    issue.path = prefix + issue.path;
    into.push_back(std::move(issue));
  }
}

}  // namespace

bool is_legal_transition(TaskStage from, TaskStage to) noexcept {
  return stage_index(to) == stage_index(from) + 1 || stage_index(to) < stage_index(from);
}

ContextManager::ContextManager(std::shared_ptr<Clock> clock, IdGenerator ids)
    : clock_(std::move(clock)), ids_(std::move(ids)) {}

ContextManager::~ContextManager() = default;

std::shared_ptr<ContextManager::Session> ContextManager::find(const std::string& session_id) const {
  std::shared_lock lock(registry_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::unknown_session, "no session '" + session_id + "'",
                Json{{"sessionId", session_id}});
  }
  return it->second;
}

std::string ContextManager::create_session(const std::string& goal) {
  if (blank(goal)) throw Error(ErrorCode::empty_goal, "goal is empty");
  auto session = std::make_shared<Session>();
  session->goal = goal;
  session->tasks.push_back({0, TaskState{TaskDecomposition{goal, {}, Json::object()}, {}}});
  session->interfaces.push_back({0, InterfaceDescription{}});
  session->append(Actor::user, ActionKind::input, std::nullopt,
                  Json{{"valueKey", "goal"}, {"value", goal}}, clock_->now_ms());

  std::unique_lock lock(registry_mutex_);
  std::string id = ids_();
  while (sessions_.count(id)) id = ids_();
  session->id = id;
  sessions_.emplace(id, std::move(session));
  return id;
}

std::int64_t ContextManager::record_action(const std::string& session_id,
                                           const ActionDraft& draft) {
  auto v = validate_action_draft(to_json(draft));
  if (!v.ok()) {
    throw Error(ErrorCode::validation_failed, describe(v.errors), Json{{"issues", to_json(v.errors)}});
  }
  if (is_engine_written_kind(draft.kind)) {
    throw Error(ErrorCode::validation_failed,
                std::string(to_string(draft.kind)) + " records are written by the engine only");
  }
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  if (draft.target) {
    const auto& ui = s->ui().value;
    const auto& page_id = draft.target->page_state_id;
    Json detail{{"pageStateId", page_id}};
    if (!ui.pages.count(page_id)) {
      throw Error(ErrorCode::dangling_target, "page '" + page_id + "' is not live", detail);
    }
    if (draft.target->component_id &&
        !ui.find_component(page_id, *draft.target->component_id)) {
      detail["componentId"] = *draft.target->component_id;
      throw Error(ErrorCode::dangling_target,
                  "component '" + *draft.target->component_id + "' is not on page '" + page_id + "'",
                  detail);
    }
  }
  return s->append(draft.actor, draft.kind, draft.target, draft.payload, clock_->now_ms());
}

ContextSnapshot ContextManager::snapshot(const std::string& session_id,
                                         std::optional<std::int64_t> since_seq) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  ContextSnapshot snap;
  snap.session_id = s->id;
  snap.goal = s->goal;
  snap.stage = s->stage;
  snap.task_version = s->task().version;
  snap.task = s->task().value;
  snap.interface_version = s->ui().version;
  snap.interface_task_version = s->interface_task_version;
  snap.ui = s->ui().value;
  snap.last_seq = static_cast<std::int64_t>(s->history.size());
  const auto from = std::clamp<std::int64_t>(since_seq.value_or(0), 0, snap.last_seq);
  snap.history.assign(s->history.begin() + from, s->history.end());
  return snap;
}

std::vector<ActionRecord> ContextManager::history(const std::string& session_id,
                                                  std::int64_t since_seq) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  const auto from =
      std::clamp<std::int64_t>(since_seq, 0, static_cast<std::int64_t>(s->history.size()));
  return {s->history.begin() + from, s->history.end()};
}

std::int64_t ContextManager::commit_task(const std::string& session_id, const TaskState& task,
                                         std::int64_t base_task_version, const Json& annotations) {
  Issues errors;
  append_issues(errors, validate_task_decomposition(to_json(task.plan)).errors, "/plan");
  for (const auto& [id, items] : task.service_data) {
    append_issues(errors, validate_basic_item_list(to_json(items)).errors, "/service_data/" + id);
  }
  if (!errors.empty()) {
    throw Error(ErrorCode::validation_failed, describe(errors), Json{{"issues", to_json(errors)}});
  }
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  if (base_task_version != s->task().version) {
    throw Error(ErrorCode::stale_base,
                "task built on version " + std::to_string(base_task_version) + ", current is " +
                    std::to_string(s->task().version),
                Json{{"base", base_task_version}, {"current", s->task().version}});
  }
  push_version(s->tasks, task);
  const auto version = s->task().version;
  Json payload{{"taskVersion", version}, {"plan", to_json(task.plan)}};
  if (annotations.is_object()) {
    for (auto it = annotations.begin(); it != annotations.end(); ++it) {
      if (!payload.contains(it.key())) payload[it.key()] = it.value();
    }
  }
  s->append(Actor::agent, ActionKind::agent_commit_task, std::nullopt, std::move(payload),
            clock_->now_ms());
  return version;
}

std::int64_t ContextManager::commit_interface(const std::string& session_id,
                                              const InterfaceDescription& ui,
                                              std::int64_t base_task_version,
                                              std::int64_t base_interface_version) {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  if (base_task_version != s->task().version || base_interface_version != s->ui().version) {
    throw Error(ErrorCode::stale_base, "interface built on an outdated base",
                Json{{"baseTask", base_task_version},
                     {"currentTask", s->task().version},
                     {"baseInterface", base_interface_version},
                     {"currentInterface", s->ui().version}});
  }

  // The engine owns sessionId and lastUpdated. Pages whose content did not
  // change keep their previous stamp.
  InterfaceDescription next = ui;
  const auto now = clock_->now_ms();
  const auto& current = s->ui().value;
  for (auto& [id, page] : next.pages) {
    page.session_id = s->id;
    auto prev = current.pages.find(id);
    if (prev != current.pages.end()) {
      PageState a = prev->second;
      PageState b = page;
      a.last_updated.reset();
      b.last_updated.reset();
      if (a == b) {
        page.last_updated = prev->second.last_updated;
        continue;
      }
    }
    page.last_updated = now;
  }

  Issues errors;
  append_issues(errors, validate_navigation(to_json(next.navigation)).errors, "/navigation");
  for (const auto& [id, page] : next.pages) {
    append_issues(errors, validate_page_state(to_json(page)).errors, "/pageStates/" + id);
  }
  for (const auto& [id, list] : next.components) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      append_issues(errors, validate_component(to_json(list[i])).errors,
                    "/components/" + id + "/" + std::to_string(i));
    }
  }
  append_issues(errors, validate_interface(next), "");
  if (!errors.empty()) {
    throw Error(ErrorCode::validation_failed, describe(errors), Json{{"issues", to_json(errors)}});
  }
  auto report = check_duality(s->task().value.plan, next);
  if (!report.empty()) {
    throw Error(ErrorCode::duality_violated,
                std::to_string(report.entries.size()) + " duality violation(s)",
                Json{{"report", report.to_json()}});
  }

  push_version(s->interfaces, std::move(next));
  s->interface_task_version = base_task_version;
  const auto version = s->ui().version;
  s->append(Actor::agent, ActionKind::agent_commit_interface, std::nullopt,
            Json{{"interfaceVersion", version},
                 {"taskVersion", base_task_version},
                 {"pageStateIds", s->ui().value.navigation.page_state_ids()}},
            now);
  return version;
}

TaskStage ContextManager::advance_stage(const std::string& session_id, TaskStage target,
                                        Actor actor) {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  const auto from = s->stage;
  if (!is_legal_transition(from, target)) {
    throw Error(ErrorCode::illegal_transition,
                std::string(to_string(from)) + " -> " + std::string(to_string(target)),
                Json{{"from", std::string(to_string(from))}, {"to", std::string(to_string(target))}});
  }
  s->stage = target;
  s->append(actor, ActionKind::stage_change, std::nullopt,
            Json{{"from", std::string(to_string(from))},
                 {"to", std::string(to_string(target))},
                 {"backtrack", stage_index(target) < stage_index(from)}},
            clock_->now_ms());
  return target;
}

std::vector<Versioned<TaskState>> ContextManager::task_versions(
    const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  return {s->tasks.begin(), s->tasks.end()};
}

std::vector<Versioned<InterfaceDescription>> ContextManager::interface_versions(
    const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  return {s->interfaces.begin(), s->interfaces.end()};
}

bool ContextManager::has_session(const std::string& session_id) const {
  std::shared_lock lock(registry_mutex_);
  return sessions_.count(session_id) > 0;
}

std::vector<std::string> ContextManager::session_ids() const {
  std::vector<std::string> ids;
  {
    std::shared_lock lock(registry_mutex_);
    for (const auto& [id, _] : sessions_) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<SessionSummary> ContextManager::summaries() const {
  std::vector<SessionSummary> out;
  for (const auto& id : session_ids()) {
    std::shared_ptr<Session> s;
    try {
      s = find(id);
    } catch (const Error&) {
      continue;  // dropped concurrently
    }
    std::lock_guard lock(s->mutex);
    out.push_back({id, s->stage, s->task().version, s->ui().version,
                   s->interface_task_version != s->task().version});
  }
  return out;
}

void ContextManager::restore(const ContextSnapshot& full) {
  if (full.last_seq != static_cast<std::int64_t>(full.history.size())) {
    throw Error(ErrorCode::corrupt_persisted_document, "history is not a full log");
  }
  for (std::size_t i = 0; i < full.history.size(); ++i) {
    if (full.history[i].seq != static_cast<std::int64_t>(i + 1)) {
      throw Error(ErrorCode::corrupt_persisted_document, "history seq is not gapless");
    }
  }
  auto session = std::make_shared<Session>();
  session->id = full.session_id;
  session->goal = full.goal;
  session->stage = full.stage;
  session->tasks.push_back({full.task_version, full.task});
  session->interfaces.push_back({full.interface_version, full.ui});
  session->interface_task_version = full.interface_task_version;
  session->history = full.history;

  std::unique_lock lock(registry_mutex_);
  if (!sessions_.emplace(full.session_id, std::move(session)).second) {
    throw Error(ErrorCode::session_exists, "session '" + full.session_id + "' already exists");
  }
}

void ContextManager::drop(const std::string& session_id) {
  std::unique_lock lock(registry_mutex_);
  sessions_.erase(session_id);
}

}  // namespace duet
