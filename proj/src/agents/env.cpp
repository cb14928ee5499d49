#include "duet/agents/env.hpp"

#include <algorithm>

#include "duet/schema/codec.hpp"

namespace duet {

namespace {

bool is_value_kind(ActionKind kind) {
  return kind == ActionKind::input || kind == ActionKind::select || kind == ActionKind::slide ||
         kind == ActionKind::pick_date;
}

bool on_page(const ActionRecord& r, const std::string& page_state_id) {
  return r.target && r.target->page_state_id == page_state_id;
}

Json item_ref(const ActionRecord& r) {
  if (!r.payload.is_object()) return nullptr;
  if (r.payload.contains("itemId")) return r.payload["itemId"];
  if (r.payload.contains("item_id")) return r.payload["item_id"];
  return nullptr;
}

}  // namespace

Json record_for_prompt(const ActionRecord& record) {
  Json j = to_json(record);
  j.erase("at");
  return j;
}

Json records_for_prompt(const std::vector<ActionRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records) out.push_back(record_for_prompt(r));
  return out;
}

std::map<std::string, Json> latest_user_values(const std::vector<ActionRecord>& history,
                                               const std::optional<std::string>& page_state_id) {
  std::map<std::string, Json> out;
  for (const auto& r : history) {
    if (r.actor != Actor::user || !is_value_kind(r.kind)) continue;
    if (page_state_id && !on_page(r, *page_state_id)) continue;
    auto key = r.value_key();
    if (!key || !r.payload.is_object() || !r.payload.contains("value")) continue;
    out[*key] = r.payload["value"];
  }
  return out;
}

std::vector<Json> favorited_items(const std::vector<ActionRecord>& history,
                                  const std::string& page_state_id) {
  std::vector<Json> out;
  for (const auto& r : history) {
    if (r.kind != ActionKind::favorite || !on_page(r, page_state_id)) continue;
    Json ref = item_ref(r);
    if (ref.is_null()) continue;
    auto it = std::find(out.begin(), out.end(), ref);
    const bool on = r.payload.value("favorite", it == out.end());
    if (on && it == out.end()) out.push_back(ref);
    if (!on && it != out.end()) out.erase(it);
  }
  return out;
}

std::vector<Json> confirmed_items(const std::vector<ActionRecord>& history,
                                  const std::string& page_state_id) {
  std::vector<Json> out;
  for (const auto& r : history) {
    if (r.kind != ActionKind::confirm || !on_page(r, page_state_id)) continue;
    Json ref = item_ref(r);
    if (ref.is_null()) continue;
    if (std::find(out.begin(), out.end(), ref) == out.end()) out.push_back(ref);
  }
  return out;
}

const BasicItem* find_item(const std::vector<BasicItem>& items, const Json& ref) {
  for (const auto& item : items) {
    if (item.id == ref) return &item;
  }
  if (ref.is_string()) {
    for (const auto& item : items) {
      if (item.title == ref.get<std::string>()) return &item;
    }
  }
  return nullptr;
}

std::vector<const Subtask*> page_subtasks(const TaskDecomposition& plan) {
  std::vector<const Subtask*> out;
  for (const auto& s : plan.subtasks) {
    if (s.has_page()) out.push_back(&s);
  }
  return out;
}

}  // namespace duet
