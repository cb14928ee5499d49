#include "duet/context/state.hpp"

#include "duet/context/hash.hpp"
#include "duet/schema/codec.hpp"

namespace duet {

namespace {

[[noreturn]] void corrupt(const std::string& what, const Issues& issues = {}) {
  throw Error(ErrorCode::malformed_document, what + (issues.empty() ? "" : ": " + describe(issues)),
              Json{{"issues", to_json(issues)}});
}

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) corrupt(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T take(Validated<T> v, const std::string& what) {
  if (!v.ok()) corrupt(what, v.errors);
  return std::move(*v.value);
}

std::int64_t int_member(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_number_integer()) corrupt(std::string("field '") + key + "' is not an integer");
  return v.get<std::int64_t>();
}

std::string string_member(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_string()) corrupt(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

}  // namespace

Json to_json(const TaskState& v) {
  Json data = Json::object();
  for (const auto& [id, items] : v.service_data) data[id] = to_json(items);
  return Json{{"plan", to_json(v.plan)}, {"service_data", std::move(data)}};
}

TaskState task_state_from_json(const Json& j) {
  TaskState t;
  t.plan = take(validate_task_decomposition(member(j, "plan")), "plan");
  const Json& data = member(j, "service_data");
  if (!data.is_object()) corrupt("service_data is not an object");
  for (auto it = data.begin(); it != data.end(); ++it) {
    t.service_data[it.key()] = take(validate_basic_item_list(it.value()), "service_data/" + it.key());
  }
  return t;
}

Json to_json(const InterfaceDescription& v) {
  return Json{{"navigation", to_json(v.navigation)},
              {"pageStates", to_json(v.pages)},
              {"components", to_json(v.components)}};
}

InterfaceDescription interface_from_json(const Json& j) {
  InterfaceDescription ui;
  ui.navigation = take(validate_navigation(member(j, "navigation")), "navigation");
  const Json& pages = member(j, "pageStates");
  if (!pages.is_object()) corrupt("pageStates is not an object");
  for (auto it = pages.begin(); it != pages.end(); ++it) {
    ui.pages[it.key()] = take(validate_page_state(it.value()), "pageStates/" + it.key());
  }
  const Json& components = member(j, "components");
  if (!components.is_object()) corrupt("components is not an object");
  for (auto it = components.begin(); it != components.end(); ++it) {
    if (!it->is_array()) corrupt("components/" + it.key() + " is not an array");
    auto& list = ui.components[it.key()];
    for (const auto& c : *it) {
      list.push_back(take(validate_component(c), "components/" + it.key()));
    }
  }
  return ui;
}

Json ContextSnapshot::to_json() const {
  Json records = Json::array();
  for (const auto& r : history) records.push_back(duet::to_json(r));
  return Json{{"sessionId", session_id},
              {"goal", goal},
              {"stage", std::string(to_string(stage))},
              {"taskVersion", task_version},
              {"task", duet::to_json(task)},
              {"interfaceVersion", interface_version},
              {"interfaceTaskVersion", interface_task_version},
              {"interface", duet::to_json(ui)},
              {"history", std::move(records)},
              {"lastSeq", last_seq}};
}

std::string ContextSnapshot::hash() const { return canonical_hash(to_json()); }

ContextSnapshot snapshot_from_json(const Json& j) {
  ContextSnapshot s;
  s.session_id = string_member(j, "sessionId");
  s.goal = string_member(j, "goal");
  auto stage = parse_task_stage(string_member(j, "stage"));
  if (!stage) corrupt("unknown stage");
  s.stage = *stage;
  s.task_version = int_member(j, "taskVersion");
  s.task = task_state_from_json(member(j, "task"));
  s.interface_version = int_member(j, "interfaceVersion");
  s.interface_task_version = int_member(j, "interfaceTaskVersion");
  s.ui = interface_from_json(member(j, "interface"));
  const Json& history = member(j, "history");
  if (!history.is_array()) corrupt("history is not an array");
  for (const auto& r : history) s.history.push_back(take(validate_action_record(r), "history"));
  s.last_seq = int_member(j, "lastSeq");
  return s;
}

}  // namespace duet
