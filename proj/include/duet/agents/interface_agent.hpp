#pragma once

#include <string>
#include <vector>

#include "duet/agents/env.hpp"

namespace duet {

struct InterfaceProposal {
  InterfaceDescription ui;
  bool navigation_fallback = false;        // heuristic replaced the model's navigation
  std::vector<std::string> fallback_pages;  // PageStates built without the model
  std::vector<std::string> reused_pages;    // PageStates carried over unchanged inputs
};

// Derives the interface for the snapshot's task. The result passes schema
// validation and check_duality against the snapshot's plan before it is
// returned. More than 15 navigable subtasks raise capacity_exceeded.
//
// Component ids are stable across versions: "title", "field:<valueKey>",
// "cards:items", "price", "action:<actionId>", "dashboard",
// "navblock:<blockId>", "plan:<pageStateId>" and "navcard:<pageStateId>".
InterfaceProposal interface_agent_step(const ContextSnapshot& snapshot, const AgentEnv& env);

// ---- navigation -------------------------------------------------------------

// Groups navigable subtasks by dependency connectivity, then step order,
// at most 5 pages per group and 3 groups. Requires at most 15 navigable
// subtasks.
Navigation heuristic_navigation(const TaskDecomposition& plan);

// Icon for a group of subtasks, from keywords in their names and APIs.
std::string group_icon_for(const std::vector<const Subtask*>& members);

// Issues when a navigation document does not list every navigable subtask's
// page exactly once, or lists anything else.
Issues check_navigation_bijection(const Json& navigation, const TaskDecomposition& plan);

// ---- pages and components ------------------------------------------------------

// Problems with the engine-interpreted parts of a stateDetail: "fields"
// (input, selection, slider and date controls) and "actions".
Issues check_state_detail(const Json& state_detail, const std::string& base_path);

// Component for one stateDetail field, or null if the field is unusable.
Json field_component(const Json& field);

// ---- CardView -----------------------------------------------------------------

// Data model of a result list: every field present in the items, described
// by the API's data model where it has an entry.
Json item_model(const std::vector<BasicItem>& items, const ApiDefinition* api);

// Lower-case word tokens of the model's field names (snake and camel case
// split).
std::vector<std::string> model_tokens(const Json& model);
// A token starting with "book", "sav" or "product".
bool favorites_rule(const Json& model);
// A token that is price(s), rating(s) or date(s).
bool sort_rule(const Json& model);

// CardView for a list page. The model proposes displayedAttributes (3 to 5,
// drawn from the model); both booleans always come from the rules above.
// When the model cannot produce a valid config, attributes are picked from
// the model and padded with id, title and BasicItem core fields.
CardViewConfig cardview_config_for(const Subtask& subtask, const Json& model, const Json& sample,
                                   const Gateway& gateway);
CardViewConfig fallback_cardview(const Subtask& subtask, const Json& model);

}  // namespace duet
