#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duet/agents/env.hpp"
#include "duet/agents/intent.hpp"

namespace duet {

struct TaskProposal {
  TaskDecomposition plan;
  std::vector<IntentSignal> signals;
};

// Proposes the next plan from a snapshot. Before Plan the result holds at
// most one clarification subtask; from Plan on an empty plan raises
// empty_plan. The latest user reorder and the latest user values (mapped to
// API params by name or alias) always win over the model's output.
TaskProposal task_agent_step(const ContextSnapshot& snapshot, const AgentEnv& env);

// Rewrites one subtask from a free-text instruction; ids, step and page id
// stay fixed. A blank instruction returns the subtask unchanged.
Subtask subtask_refine(const ContextSnapshot& snapshot, const std::string& subtask_id,
                       const std::string& instruction, const AgentEnv& env);
Subtask subtask_refine(const TaskDecomposition& plan, const std::string& subtask_id,
                       const std::string& instruction, const AgentEnv& env);

// ---- deterministic post-processing, exposed for tests ---------------------------

std::string stage_guidance(TaskStage stage, const TaskDefinition& task, bool after_booking);

// True when the window holds the first confirm made since entering Duet.
bool first_duet_confirm(const std::vector<ActionRecord>& history,
                        const std::vector<ActionRecord>& window);

// Stable sort by step_id, then step_ids 1..n.
void renumber_steps(TaskDecomposition& plan);

// new_order of the most recent user reorder record.
std::optional<std::vector<std::string>> latest_reorder(const std::vector<ActionRecord>& history);

// Subtasks named in `order` take the slots those subtasks occupy, in the
// given order; everything else keeps its position.
void apply_reorder(TaskDecomposition& plan, const std::vector<std::string>& order);

// Writes user values into matched API payloads whose catalog params accept
// them.
void apply_payload_bias(TaskDecomposition& plan, const std::map<std::string, Json>& values,
                        const Catalog& catalog);

// "known-api" issues for matched_apis not in the catalog.
Issues check_known_apis(const Json& subtasks, const Catalog& catalog, const std::string& base_path);

}  // namespace duet
