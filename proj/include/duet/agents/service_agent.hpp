#pragma once

#include <map>
#include <string>
#include <vector>

#include "duet/agents/env.hpp"

namespace duet {

// Fabricates service results for one API call through the service mocker,
// standardizing them into BasicItems when the raw records do not already
// conform. Each item with an image_query gets extra.image_url =
// "placeholder://<image_query>". With `require_items` an empty result is a
// validation failure that triggers repair.
std::vector<BasicItem> service_agent_fetch(const AvailableApi& call, const TaskDefinition& task,
                                           const std::vector<std::string>& platforms,
                                           const AgentEnv& env, bool require_items = true);

// Service data for a proposed plan plus the agent records describing what
// was fetched.
struct ServiceRefresh {
  std::map<std::string, std::vector<BasicItem>> service_data;
  std::vector<ActionDraft> records;  // agent_search / agent_recommend, in order
};

// From Explore on, list and detail subtasks whose data-fetching calls are new
// or changed (or that have no data yet) are fetched again; other subtasks
// keep their previous data. Before Explore nothing is fetched. Data of
// subtasks that left the plan is dropped.
ServiceRefresh refresh_service_data(const TaskState& previous, const TaskDecomposition& plan,
                                    TaskStage stage, const std::string& goal, const AgentEnv& env);

// Item the agent recommends: the cheapest priced item, else the first.
const BasicItem* recommended_item(const std::vector<BasicItem>& items);

}  // namespace duet
