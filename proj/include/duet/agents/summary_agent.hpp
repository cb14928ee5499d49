#pragma once

#include <string>
#include <vector>

#include "duet/agents/env.hpp"

namespace duet {

struct LivePage {
  std::string page_state_id;
  std::string title;
  PageType page_type = PageType::list;
};

// Pages the next interface will hold: every page-bearing subtask of the
// snapshot's plan.
std::vector<LivePage> live_pages(const ContextSnapshot& snapshot);

// What the summary may draw on: goal, stage, the user's latest values, and
// confirmed and favorited items with their titles and prices.
Json summary_context(const ContextSnapshot& snapshot);

// Prices, numeric or date values, or item counts present in a context.
bool has_quantifiable_data(const Json& context);

// Generates the summary view. Nav-blocks must resolve to live pages and a
// dashboard is required when the context holds quantifiable data; both are
// enforced through gateway repair. Exhausted repair on reference issues
// raises unresolvable_reference.
SummaryContent summary_agent_step(const ContextSnapshot& snapshot, const AgentEnv& env);
SummaryContent summary_agent_step(const ContextSnapshot& snapshot, const AgentEnv& env,
                                  const std::vector<LivePage>& pages);

}  // namespace duet
