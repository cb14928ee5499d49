#include "duet/agents/task_agent.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "duet/schema/codec.hpp"

namespace duet {

namespace {

Issue known_api_issue(const std::string& path, const std::string& name) {
  return Issue{IssueCode::invariant_violated, path, "known-api",
               "'" + name + "' is not an available API"};
}

Issues check_subtask_apis(const Json& subtask, const Catalog& catalog, const std::string& path) {
  Issues out;
  if (!subtask.is_object() || !subtask.contains("matched_apis") ||
      !subtask["matched_apis"].is_array()) {
    return out;
  }
  const Json& apis = subtask["matched_apis"];
  for (std::size_t j = 0; j < apis.size(); ++j) {
    const Json& name = apis[j].is_object() ? apis[j].value("api_name", Json()) : Json();
    if (name.is_string() && !catalog.find_api(name.get<std::string>())) {
      out.push_back(known_api_issue(path + "/matched_apis/" + std::to_string(j) + "/api_name",
                                    name.get<std::string>()));
    }
  }
  return out;
}

// A page_type without a page id would fail validation; the id is the
// engine's to assign, so fill it in deterministically.
void fill_page_id(Json& subtask) {
  if (!subtask.is_object() || !subtask.contains("page_type") || subtask["page_type"].is_null()) {
    return;
  }
  const bool missing = !subtask.contains("page_state_id") || subtask["page_state_id"].is_null() ||
                       (subtask["page_state_id"].is_string() &&
                        subtask["page_state_id"].get<std::string>().empty());
  if (missing && subtask.contains("subtask_id") && subtask["subtask_id"].is_string()) {
    subtask["page_state_id"] = "page-" + subtask["subtask_id"].get<std::string>();
  }
}

std::int64_t step_key(const Json& subtask) {
  if (subtask.is_object() && subtask.contains("step_id") && subtask["step_id"].is_number()) {
    return subtask["step_id"].get<std::int64_t>();
  }
  return std::numeric_limits<std::int64_t>::max();
}

void prepare_plan(Json& doc, const std::string& goal) {
  if (!doc.is_object()) return;
  doc["goal"] = goal;
  if (!doc.contains("subtasks") || !doc["subtasks"].is_array()) return;
  auto& subtasks = doc["subtasks"];
  std::vector<Json> items(subtasks.begin(), subtasks.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const Json& a, const Json& b) { return step_key(a) < step_key(b); });
  std::int64_t step = 1;
  for (auto& s : items) {
    if (s.is_object()) s["step_id"] = step++;
    fill_page_id(s);
  }
  subtasks = Json(items);
}

const char* stage_text(TaskStage stage) {
  switch (stage) {
    case TaskStage::define:
      return "Clarify the goal. Return exactly one subtask with page_type \"form\" that asks the "
             "single most important clarifying question as a selection field.";
    case TaskStage::empathize:
      return "Build a profile of the user. Return exactly one subtask with page_type \"form\" "
             "that collects the preferences this task depends on and reflects the answers "
             "already given.";
    case TaskStage::plan:
      return "Lay out the full plan: one subtask per step with a list, detail or form page, a "
             "plan overview the user can reorder, and a summary page.";
    case TaskStage::explore:
      return "Keep the plan. Update the API payloads from the user's latest choices so fresh "
             "results can be fetched for every list page.";
    case TaskStage::refine:
      return "Keep the plan. Narrow the API payloads with the user's filters, sorting and "
             "confirmations.";
    case TaskStage::duet:
      return "Keep the plan and the summary current. Anticipate what the user needs next.";
  }
  return "";
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::string stage_guidance(TaskStage stage, const TaskDefinition& task, bool after_booking) {
  std::string out = stage_text(stage);
  if (stage == TaskStage::empathize && !task.prompt_description.empty()) {
    out += " Task context: " + task.prompt_description;
  }
  if (stage == TaskStage::duet && after_booking) {
    out += " The user just completed a booking: proactively add follow-up subtasks such as "
           "nearby attractions or a guide for the booked destination, and recommend one.";
  }
  return out;
}

bool first_duet_confirm(const std::vector<ActionRecord>& history,
                        const std::vector<ActionRecord>& window) {
  std::optional<std::int64_t> entered;
  for (const auto& r : history) {
    if (r.kind == ActionKind::stage_change && r.payload.is_object() &&
        lower(r.payload.value("to", "")) == "duet") {
      entered = r.seq;
    }
  }
  if (!entered) return false;
  std::optional<std::int64_t> first_confirm;
  for (const auto& r : history) {
    if (r.seq > *entered && r.kind == ActionKind::confirm && r.actor == Actor::user) {
      first_confirm = r.seq;
      break;
    }
  }
  if (!first_confirm) return false;
  return std::any_of(window.begin(), window.end(),
                     [&](const ActionRecord& r) { return r.seq == *first_confirm; });
}

void renumber_steps(TaskDecomposition& plan) {
  std::stable_sort(plan.subtasks.begin(), plan.subtasks.end(),
                   [](const Subtask& a, const Subtask& b) { return a.step_id < b.step_id; });
  std::int64_t step = 1;
  for (auto& s : plan.subtasks) s.step_id = step++;
}

std::optional<std::vector<std::string>> latest_reorder(const std::vector<ActionRecord>& history) {
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->kind != ActionKind::reorder || it->actor != Actor::user) continue;
    const Json& order = it->payload.is_object() ? it->payload.value("new_order", Json()) : Json();
    if (!order.is_array()) continue;
    std::vector<std::string> ids;
    for (const auto& id : order) {
      if (id.is_string()) ids.push_back(id.get<std::string>());
    }
    return ids;
  }
  return std::nullopt;
}

void apply_reorder(TaskDecomposition& plan, const std::vector<std::string>& order) {
  std::vector<std::size_t> slots;
  std::vector<Subtask> moved;
  for (const auto& id : order) {
    for (std::size_t i = 0; i < plan.subtasks.size(); ++i) {
      if (plan.subtasks[i].subtask_id == id &&
          std::find(slots.begin(), slots.end(), i) == slots.end()) {
        slots.push_back(i);
        moved.push_back(plan.subtasks[i]);
        break;
      }
    }
  }
  std::vector<std::size_t> sorted = slots;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) plan.subtasks[sorted[k]] = moved[k];
  // Positions are the order now; step ids follow them.
  std::int64_t step = 1;
  for (auto& s : plan.subtasks) s.step_id = step++;
}

void apply_payload_bias(TaskDecomposition& plan, const std::map<std::string, Json>& values,
                        const Catalog& catalog) {
  for (auto& s : plan.subtasks) {
    for (auto& call : s.matched_apis) {
      const auto* def = catalog.find_api(call.api_name);
      if (!def) continue;
      if (!call.payload.is_object()) call.payload = Json::object();
      for (const auto& [key, value] : values) {
        if (const auto* param = def->param_for(key)) call.payload[param->name] = value;
      }
    }
  }
}

Issues check_known_apis(const Json& subtasks, const Catalog& catalog, const std::string& base_path) {
  Issues out;
  if (!subtasks.is_array()) return out;
  for (std::size_t i = 0; i < subtasks.size(); ++i) {
    auto issues = check_subtask_apis(subtasks[i], catalog, base_path + "/" + std::to_string(i));
    out.insert(out.end(), issues.begin(), issues.end());
  }
  return out;
}

TaskProposal task_agent_step(const ContextSnapshot& snapshot, const AgentEnv& env) {
  const auto& history = snapshot.history;
  const auto window = intent_window(history);
  const TaskDefinition& task = env.catalog.task_for_goal(snapshot.goal);

  TaskProposal out;
  out.signals = infer_intents(window);

  std::vector<ActionRecord> user_window;
  for (const auto& r : window) {
    if (r.actor == Actor::user) user_window.push_back(r);
  }

  Bindings b;
  b["user_goal_text"] = snapshot.goal;
  b["list_of_available_apis_json"] = canonical_dump(env.catalog.apis_json());
  b["stage"] = std::string(to_string(snapshot.stage));
  b["stage_guidance"] = stage_guidance(snapshot.stage, task, first_duet_confirm(history, window));
  b["current_plan_json"] = canonical_dump(to_json(snapshot.task.plan));
  b["recent_actions_json"] = canonical_dump(records_for_prompt(user_window));
  b["intent_signals_json"] = canonical_dump(to_json(out.signals));

  GatewayHooks hooks;
  hooks.prepare = [&](Json& doc) { prepare_plan(doc, snapshot.goal); };
  hooks.check = [&](const Json& doc) {
    return check_known_apis(doc.value("subtasks", Json::array()), env.catalog, "/subtasks");
  };
  auto result = env.gateway.complete_validated(TemplateId::task_decompose, b, hooks);
  auto parsed = validate_task_decomposition(result.value);
  if (!parsed.ok()) {
    throw Error(ErrorCode::validation_failed, describe(parsed.errors),
                Json{{"issues", to_json(parsed.errors)}});
  }
  TaskDecomposition plan = std::move(*parsed.value);
  renumber_steps(plan);

  if (stage_index(snapshot.stage) < stage_index(TaskStage::plan)) {
    if (plan.subtasks.size() > 1) plan.subtasks.resize(1);
    for (auto& s : plan.subtasks) s.dependent_subtasks.clear();
  } else if (plan.subtasks.empty()) {
    throw Error(ErrorCode::empty_plan, "planner returned no subtasks at stage " +
                                           std::string(to_string(snapshot.stage)));
  }

  if (auto order = latest_reorder(history)) apply_reorder(plan, *order);
  apply_payload_bias(plan, latest_user_values(history), env.catalog);

  auto final_check = validate_task_decomposition(to_json(plan));
  if (!final_check.ok()) {
    throw Error(ErrorCode::validation_failed, describe(final_check.errors),
                Json{{"issues", to_json(final_check.errors)}});
  }
  out.plan = std::move(plan);
  return out;
}

Subtask subtask_refine(const ContextSnapshot& snapshot, const std::string& subtask_id,
                       const std::string& instruction, const AgentEnv& env) {
  return subtask_refine(snapshot.task.plan, subtask_id, instruction, env);
}

Subtask subtask_refine(const TaskDecomposition& plan, const std::string& subtask_id,
                       const std::string& instruction, const AgentEnv& env) {
  const Subtask* original = plan.find(subtask_id);
  if (!original) {
    throw Error(ErrorCode::unknown_subtask, "no subtask '" + subtask_id + "'",
                Json{{"subtask_id", subtask_id}});
  }
  if (std::all_of(instruction.begin(), instruction.end(),
                  [](unsigned char c) { return std::isspace(c); })) {
    return *original;
  }

  Bindings b;
  b["existing_subtask_json"] = canonical_dump(to_json(*original));
  b["refinement_instruction_text"] = instruction;
  b["list_of_available_apis_json"] = canonical_dump(env.catalog.apis_json());

  GatewayHooks hooks;
  hooks.prepare = [&](Json& doc) {
    if (!doc.is_object()) return;
    doc["subtask_id"] = original->subtask_id;
    doc["step_id"] = original->step_id;
    if (original->page_state_id) doc["page_state_id"] = *original->page_state_id;
    fill_page_id(doc);
  };
  hooks.check = [&](const Json& doc) { return check_subtask_apis(doc, env.catalog, ""); };
  auto result = env.gateway.complete_validated(TemplateId::subtask_refine, b, hooks);
  auto parsed = validate_subtask(result.value);
  if (!parsed.ok()) {
    throw Error(ErrorCode::validation_failed, describe(parsed.errors),
                Json{{"issues", to_json(parsed.errors)}});
  }

  TaskDecomposition in_context = plan;
  for (auto& s : in_context.subtasks) {
    if (s.subtask_id == subtask_id) s = *parsed.value;
  }
  auto check = validate_task_decomposition(to_json(in_context));
  if (!check.ok()) {
    throw Error(ErrorCode::validation_failed,
                "refined subtask breaks the plan: " + describe(check.errors),
                Json{{"issues", to_json(check.errors)}});
  }
  return std::move(*parsed.value);
}

}  // namespace duet
