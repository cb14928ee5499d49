#include "duet/agents/summary_agent.hpp"

#include <regex>

#include "duet/schema/codec.hpp"

namespace duet {

namespace {

constexpr std::size_t kHistoryWindow = 30;

bool looks_like_date(const Json& v) {
  static const std::regex date(R"(^\d{4}-\d{2}-\d{2})");
  return v.is_string() && std::regex_search(v.get<std::string>(), date);
}

Json item_entry(const std::string& page, const Json& ref, const std::vector<BasicItem>* items) {
  Json e{{"pageStateId", page}, {"itemId", ref}};
  if (items) {
    if (const BasicItem* item = find_item(*items, ref)) {
      e["itemId"] = item->id;
      e["title"] = item->title;
      if (item->price) e["price"] = price_total(*item->price);
    }
  }
  return e;
}

}  // namespace

std::vector<LivePage> live_pages(const ContextSnapshot& snapshot) {
  std::vector<LivePage> out;
  for (const Subtask* s : page_subtasks(snapshot.task.plan)) {
    out.push_back({*s->page_state_id, s->subtask_name, *s->page_type});
  }
  return out;
}

Json summary_context(const ContextSnapshot& snapshot) {
  Json values = Json::object();
  for (const auto& [k, v] : latest_user_values(snapshot.history)) {
    if (k != "goal") values[k] = v;
  }
  Json confirmed = Json::array();
  Json favorites = Json::array();
  for (const Subtask* s : page_subtasks(snapshot.task.plan)) {
    const auto data = snapshot.task.service_data.find(s->subtask_id);
    const auto* items = data == snapshot.task.service_data.end() ? nullptr : &data->second;
    for (const auto& ref : confirmed_items(snapshot.history, *s->page_state_id)) {
      confirmed.push_back(item_entry(*s->page_state_id, ref, items));
    }
    for (const auto& ref : favorited_items(snapshot.history, *s->page_state_id)) {
      favorites.push_back(item_entry(*s->page_state_id, ref, items));
    }
  }
  return Json{{"goal", snapshot.goal},
              {"stage", std::string(to_string(snapshot.stage))},
              {"values", values},
              {"confirmed", confirmed},
              {"favorites", favorites}};
}

bool has_quantifiable_data(const Json& context) {
  for (const auto& key : {"confirmed", "favorites"}) {
    if (context.contains(key) && !context[key].empty()) return true;
  }
  if (context.contains("values")) {
    for (const auto& v : context["values"]) {
      if (v.is_number() || looks_like_date(v)) return true;
    }
  }
  return false;
}

SummaryContent summary_agent_step(const ContextSnapshot& snapshot, const AgentEnv& env) {
  return summary_agent_step(snapshot, env, live_pages(snapshot));
}

SummaryContent summary_agent_step(const ContextSnapshot& snapshot, const AgentEnv& env,
                                  const std::vector<LivePage>& pages) {
  std::vector<ActionRecord> user;
  std::optional<ActionRecord> latest;
  for (const auto& r : snapshot.history) {
    if (r.actor == Actor::user) latest = r;
    if (r.actor == Actor::user || r.kind == ActionKind::agent_recommend) user.push_back(r);
  }
  if (user.size() > kHistoryWindow) {
    user.erase(user.begin(), user.end() - static_cast<std::ptrdiff_t>(kHistoryWindow));
  }

  std::vector<std::string> ids;
  Json pages_json = Json::array();
  for (const auto& p : pages) {
    ids.push_back(p.page_state_id);
    pages_json.push_back(Json{{"pageStateId", p.page_state_id},
                              {"title", p.title},
                              {"pageType", std::string(to_string(p.page_type))}});
  }
  const Json context = summary_context(snapshot);
  const bool quantifiable = has_quantifiable_data(context);

  Bindings b;
  b["latest_input_json"] = latest ? canonical_dump(record_for_prompt(*latest)) : "null";
  b["history_json"] = canonical_dump(records_for_prompt(user));
  b["context_json"] = canonical_dump(context);
  b["live_pages_json"] = canonical_dump(pages_json);

  GatewayHooks hooks;
  hooks.check = [&](const Json& doc) {
    Issues issues;
    auto parsed = validate_summary_content(doc);
    if (!parsed.ok()) return parsed.errors;
    issues = check_summary_references(*parsed.value, ids);
    if (quantifiable && (!parsed.value->dashboard_config || parsed.value->dashboard_config->items.empty())) {
      issues.push_back({IssueCode::invariant_violated, "/dashboardConfig", "dashboard-required",
                        "the context holds prices, dates or counts to visualize"});
    }
    return issues;
  };

  try {
    auto result = env.gateway.complete_validated(TemplateId::summary_gen, b, hooks);
    return std::move(*validate_summary_content(result.value).value);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::exhausted_attempts) throw;
    const Json& trace = e.detail().value("trace", Json::array());
    if (!trace.empty()) {
      for (const auto& issue : trace.back().value("issues", Json::array())) {
        const std::string name = issue.value("name", "");
        if (name == "zero-hallucination" || name == "placeholder-resolves") {
          throw Error(ErrorCode::unresolvable_reference,
                      "summary still references unknown pages after repair", e.detail());
        }
      }
    }
    throw;
  }
}

}  // namespace duet
