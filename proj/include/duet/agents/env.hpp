#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "duet/agents/catalog.hpp"
#include "duet/context/state.hpp"
#include "duet/llm/gateway.hpp"

namespace duet {

// What every agent call needs besides the snapshot. Agents hold no state of
// their own; both references must outlive the call.
struct AgentEnv {
  const Gateway& gateway;
  const Catalog& catalog;
};

// A record as shown to a model: wire form without the timestamp, so prompts
// (and fixture fingerprints) do not depend on the clock.
Json record_for_prompt(const ActionRecord& record);
Json records_for_prompt(const std::vector<ActionRecord>& records);

// Latest user-written value per valueKey, optionally limited to one page.
// Covers input, select, slide and pick_date records carrying payload.value.
std::map<std::string, Json> latest_user_values(const std::vector<ActionRecord>& history,
                                               const std::optional<std::string>& page_state_id = {});

// Item ids the user favorited on a page (toggle semantics, first-favorite
// order) and confirmed on a page (first-confirm order).
std::vector<Json> favorited_items(const std::vector<ActionRecord>& history,
                                  const std::string& page_state_id);
std::vector<Json> confirmed_items(const std::vector<ActionRecord>& history,
                                  const std::string& page_state_id);

// Item matching `ref` by id, falling back to title.
const BasicItem* find_item(const std::vector<BasicItem>& items, const Json& ref);

// Subtasks that own a page, in plan order.
std::vector<const Subtask*> page_subtasks(const TaskDecomposition& plan);

}  // namespace duet
