#include "duet/agents/service_agent.hpp"

#include <algorithm>

#include "duet/schema/codec.hpp"

namespace duet {

namespace {

std::string style_lines(const std::vector<std::string>& platforms, const Catalog& catalog) {
  std::string out;
  for (const auto& id : platforms) {
    const auto* p = catalog.find_platform(id);
    if (!p) continue;
    out += "\n- " + p->name + ": " + p->prompt_description;
  }
  return out;
}

std::string data_model_lines(const ApiDefinition& api) {
  return "\n    Return {\"records\": [...]} with 3 to 6 records. Each record describes one result "
         "with these fields: " +
         canonical_dump(api.data_model) +
         ". Prefer the BasicItem shape: id, title, description, tags, price, image_query, "
         "extended_attributes [{key, value}].";
}

Issues require_non_empty(const Json& records, const std::string& path) {
  if (records.is_array() && !records.empty()) return {};
  return {Issue{IssueCode::invariant_violated, path, "non-empty-result",
                "a list page needs at least one record"}};
}

// Fetching calls of a subtask, the part of a plan that decides its data.
Json fetch_key(const Subtask& s, const Catalog& catalog) {
  Json out = Json::array();
  for (const auto& call : s.matched_apis) {
    const auto* def = catalog.find_api(call.api_name);
    if (def && def->fetches_data) out.push_back(to_json(call));
  }
  return out;
}

bool wants_data(const Subtask& s) {
  return s.page_type && (*s.page_type == PageType::list || *s.page_type == PageType::detail);
}

}  // namespace

std::vector<BasicItem> service_agent_fetch(const AvailableApi& call, const TaskDefinition& task,
                                           const std::vector<std::string>& platforms,
                                           const AgentEnv& env, bool require_items) {
  const ApiDefinition& api = env.catalog.api(call.api_name);
  for (const auto& p : platforms) {
    if (std::find(task.supported_platforms.begin(), task.supported_platforms.end(), p) ==
        task.supported_platforms.end()) {
      throw Error(ErrorCode::config_error,
                  "platform '" + p + "' is not supported by task '" + task.id + "'");
    }
  }

  Bindings b;
  b["task_description"] = task.prompt_description;
  b["style_instructions"] = style_lines(platforms, env.catalog);
  b["data_model_instructions"] = data_model_lines(api);
  b["user_query"] = api.api_name + " " + canonical_dump(call.payload);

  GatewayHooks mock_hooks;
  if (require_items) {
    mock_hooks.check = [](const Json& records) { return require_non_empty(records, ""); };
  }
  auto raw = env.gateway.complete_validated(TemplateId::service_mock, b, mock_hooks);

  std::vector<BasicItem> items;
  auto direct = validate_basic_item_list(raw.value);
  if (direct.ok()) {
    items = std::move(*direct.value);
  } else {
    Bindings sb{{"raw_api_data_json", canonical_dump(raw.value)}};
    GatewayHooks std_hooks;
    if (require_items) {
      std_hooks.check = [](const Json& list) { return require_non_empty(list, ""); };
    }
    auto standardized = env.gateway.complete_validated(TemplateId::data_standardize, sb, std_hooks);
    items = std::move(*validate_basic_item_list(standardized.value).value);
  }

  for (auto& item : items) {
    if (item.image_query && !item.image_query->empty()) {
      item.extra["image_url"] = "placeholder://" + *item.image_query;
    }
  }
  return items;
}

const BasicItem* recommended_item(const std::vector<BasicItem>& items) {
  const BasicItem* best = nullptr;
  for (const auto& item : items) {
    if (!item.price) continue;
    if (!best || price_total(*item.price) < price_total(*best->price)) best = &item;
  }
  if (best) return best;
  return items.empty() ? nullptr : &items.front();
}

ServiceRefresh refresh_service_data(const TaskState& previous, const TaskDecomposition& plan,
                                    TaskStage stage, const std::string& goal, const AgentEnv& env) {
  ServiceRefresh out;
  const bool fetching = stage_index(stage) >= stage_index(TaskStage::explore);
  const TaskDefinition& task = env.catalog.task_for_goal(goal);

  for (const auto& s : plan.subtasks) {
    auto old_data = previous.service_data.find(s.subtask_id);
    const Subtask* old = previous.plan.find(s.subtask_id);
    const Json key = fetch_key(s, env.catalog);
    const bool changed = !old || fetch_key(*old, env.catalog) != key;
    const bool have = old_data != previous.service_data.end();

    if (!fetching || !wants_data(s) || key.empty() || (have && !changed)) {
      if (have) out.service_data[s.subtask_id] = old_data->second;
      continue;
    }

    std::vector<BasicItem> items;
    for (const auto& call : s.matched_apis) {
      const ApiDefinition& api = env.catalog.api(call.api_name);
      if (!api.fetches_data) continue;
      const auto platforms = env.catalog.platforms_for(api, task, call.payload);
      auto fetched = service_agent_fetch(call, task, platforms, env,
                                         *s.page_type == PageType::list);
      out.records.push_back(ActionDraft{
          Actor::agent, ActionKind::agent_search, std::nullopt,
          Json{{"subtask_id", s.subtask_id},
               {"pageStateId", s.page_state_id.value_or("")},
               {"api_name", call.api_name},
               {"payload", call.payload},
               {"platforms", platforms},
               {"count", fetched.size()}}});
      items.insert(items.end(), fetched.begin(), fetched.end());
    }
    if (const BasicItem* top = recommended_item(items)) {
      Json rec{{"subtask_id", s.subtask_id},
               {"pageStateId", s.page_state_id.value_or("")},
               {"itemId", top->id},
               {"title", top->title}};
      if (top->price) rec["price"] = price_total(*top->price);
      out.records.push_back(ActionDraft{Actor::agent, ActionKind::agent_recommend, std::nullopt, rec});
    }
    out.service_data[s.subtask_id] = std::move(items);
  }
  return out;
}

}  // namespace duet
