#pragma once

// Shared helpers for the unit, property and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "duet/agents/catalog.hpp"
#include "duet/context/manager.hpp"
#include "duet/context/state.hpp"
#include "duet/llm/gateway.hpp"
#include "duet/llm/provider.hpp"
#include "duet/schema/types.hpp"

namespace duet::test {

std::filesystem::path source_dir();
std::filesystem::path catalog_dir();
std::filesystem::path barcelona_fixtures();
std::filesystem::path barcelona_trace();

// The shipped catalog, loaded once.
std::shared_ptr<const Catalog> shipped_catalog();

// Subtask with a page ("page-<id>") unless `type` is nullopt.
Subtask make_subtask(const std::string& id, std::int64_t step, std::optional<PageType> type,
                     const std::string& api = "review_plan");

// Random valid plan: up to `max_subtasks` subtasks, step ids 1..n, random
// page types with summary/confirmation sprinkled in, some pageless
// subtasks, dependencies only on earlier subtasks.
TaskDecomposition random_plan(std::mt19937_64& rng, std::size_t max_subtasks = 10);

// Plan snapshot as the interface agent sees it (no history beyond the goal).
ContextSnapshot plan_snapshot(const TaskDecomposition& plan, TaskStage stage = TaskStage::plan);

// Returns `reply(request)` for every call; records the requests.
class LambdaProvider final : public CompletionProvider {
 public:
  using Reply = std::function<std::string(const CompletionRequest&)>;
  explicit LambdaProvider(Reply reply, bool deterministic = true)
      : reply_(std::move(reply)), deterministic_(deterministic) {}

  std::string name() const override { return "lambda"; }
  bool deterministic() const override { return deterministic_; }
  std::string complete(const CompletionRequest& request) override;

  int calls() const noexcept { return calls_; }
  std::vector<int> attempts() const { return attempts_; }

 private:
  Reply reply_;
  bool deterministic_;
  int calls_ = 0;
  std::vector<int> attempts_;
};

// Garbage for every template except summary_gen, which gets a valid summary
// linking the first live page (and a dashboard). Drives every agent into its
// heuristic fallback.
std::shared_ptr<CompletionProvider> fallback_provider();

// Gateway over `provider` with a zero sleeper.
std::shared_ptr<Gateway> quiet_gateway(std::shared_ptr<CompletionProvider> provider,
                                       GatewayBudget budget = {});

// Navigation document with `groups` groups of one page each, "page-g<i>".
Json navigation_doc(std::size_t groups);

// Planner answering task_decompose with random_plan, seeded by `seed` and the
// request's bindings (identical requests, identical plans). Everything else
// goes to fallback_provider().
std::shared_ptr<CompletionProvider> random_plan_provider(std::uint64_t seed);

// Drives a synchronous orchestrator through `ops` random operations (user
// actions on live components, navigation, reorders, legal stage moves) and
// checks the history laws after every one. Returns the first violation.
struct FuzzOutcome {
  std::optional<std::string> violation;
  std::size_t records = 0;
  std::size_t task_commits = 0;
  std::size_t interface_commits = 0;
};
FuzzOutcome history_fuzz(std::uint64_t seed, std::size_t ops);

}  // namespace duet::test
