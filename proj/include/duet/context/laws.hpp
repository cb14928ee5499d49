#pragma once

// History laws every session must satisfy. Each returns a description of
// the first violation, or nullopt.

#include <optional>
#include <string>
#include <vector>

#include "duet/schema/actions.hpp"

namespace duet {

// seq runs 1, 2, 3, ... without gaps or repeats.
std::optional<std::string> check_gapless(const std::vector<ActionRecord>& history);

// `earlier` is a prefix of `later` (records are never rewritten or dropped).
std::optional<std::string> check_prefix(const std::vector<ActionRecord>& earlier,
                                        const std::vector<ActionRecord>& later);

// taskVersion in agent_commit_task and interfaceVersion in
// agent_commit_interface strictly increase, and an interface never claims a
// task version that was not committed yet.
std::optional<std::string> check_version_monotonicity(const std::vector<ActionRecord>& history);

// Every agent_commit_task is followed by an agent_commit_interface before
// the next agent_commit_task. With `quiescent` the last task commit must
// also have its interface commit.
std::optional<std::string> check_loop_ordering(const std::vector<ActionRecord>& history,
                                               bool quiescent = true);

}  // namespace duet
