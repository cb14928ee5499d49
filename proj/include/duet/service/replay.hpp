#pragma once

// Trace replay. A trace is a JSON document:
//
//   {"meta":  {"name", "seed", "goal", "fixtures", "catalog"},
//    "steps": [{"action": {kind, target, payload}},
//              {"advance": "Empathize"},
//              {"assert": "<check>", "args": {...}},
//              ...]}
//
// Any step may carry "expect_stage" (checked before the step runs) and a
// free-text "note". Replays run on a manual clock, sequential session ids and
// the scripted provider, with loops executed inline, so two replays of the
// same trace and fixtures produce byte-identical reports.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "duet/loop/orchestrator.hpp"

namespace duet {

struct TraceStep {
  enum class Kind { action, advance, check };
  Kind kind = Kind::action;
  std::optional<TaskStage> expect_stage;
  ActionDraft action;
  TaskStage advance = TaskStage::define;
  std::string check;
  Json args = Json::object();
  std::string note;
};

struct Trace {
  std::string name;
  std::int64_t seed = 0;
  std::string goal;
  std::string fixtures;  // relative to the trace file
  std::string catalog;   // relative to the trace file
  std::vector<TraceStep> steps;

  // Throws malformed_document naming the offending step.
  static Trace from_json(const Json& doc);
  static Trace load(const std::filesystem::path& file);  // config_error if unreadable
};

struct StepResult {
  std::size_t index = 0;
  std::string op;  // "action", "advance", "assert"
  bool ok = true;
  std::string message;
  Json info = Json::object();

  Json to_json() const;
};

// State visible to assertion checks.
struct ReplayView {
  const ContextSnapshot& snapshot;
  const std::vector<ActionRecord>& step_records;  // appended by the previous step
  const Orchestrator& orchestrator;
};

// A check returns an empty string on success, else the failure message.
using ReplayCheck = std::function<std::string(const ReplayView&, const Json& args)>;

// Registered checks: duality_empty, stage_is, page_count, history_contains,
// snapshot_hash, plan_order, component_exists, item_present,
// summary_references_live, no_loop_failures, interface_current.
const std::map<std::string, ReplayCheck>& replay_checks();

struct ReplayReport {
  Json doc;
  bool passed = false;
  Json final_state;  // ContextSnapshot::to_json() after the last step

  std::string bytes() const;  // canonical serialization
};

class Replayer {
 public:
  Replayer(Trace trace, std::shared_ptr<CompletionProvider> provider,
           std::shared_ptr<const Catalog> catalog, GatewayBudget budget = {});
  ~Replayer();

  // Runs the next step; false once all steps ran.
  bool step();
  ReplayReport run();  // remaining steps, then the report
  ReplayReport report() const;

  std::size_t position() const noexcept { return next_; }
  const Trace& trace() const noexcept { return trace_; }
  const std::string& session_id() const noexcept { return session_id_; }
  ContextManager& context() noexcept { return *context_; }
  Orchestrator& orchestrator() noexcept { return *orchestrator_; }

 private:
  StepResult execute(const TraceStep& step, std::size_t index);

  Trace trace_;
  std::unique_ptr<ContextManager> context_;
  std::unique_ptr<Orchestrator> orchestrator_;
  std::string session_id_;
  std::size_t next_ = 0;
  std::vector<StepResult> results_;
  std::vector<ActionRecord> last_step_records_;
};

// Loads trace, fixtures and catalog from disk and replays. Empty paths fall
// back to the trace's meta (resolved against the trace file's directory).
ReplayReport replay_files(const std::filesystem::path& trace_file,
                          const std::filesystem::path& fixtures_dir = {},
                          const std::filesystem::path& catalog_dir = {});

// Subset match: objects match key-wise, arrays when every needle element
// matches some haystack element, scalars by equality.
bool json_contains(const Json& haystack, const Json& needle);

}  // namespace duet
