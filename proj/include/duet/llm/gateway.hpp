#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "duet/llm/provider.hpp"

namespace duet {

struct GatewayBudget {
  int max_attempts = 3;
  std::chrono::milliseconds per_attempt_timeout{30'000};
  bool repair_enabled = true;
};

struct Attempt {
  int number = 0;
  std::string raw;                 // provider output, empty if the call failed
  std::optional<std::string> error;  // ErrorCode name of the failure, if any
  Issues issues;                   // validation or extra-check issues

  bool ok() const noexcept { return !error.has_value(); }
  Json to_json() const;
};

struct GatewayResult {
  Json value;  // normalized, schema-valid document
  std::vector<Attempt> trace;

  Json trace_json() const;
};

// Per-call customization used by the agents. `prepare` may patch the
// extracted document before validation (e.g. force ids the engine owns);
// `check` adds issues beyond the schema, which trigger repair like schema
// errors do.
struct GatewayHooks {
  std::function<void(Json&)> prepare;
  std::function<Issues(const Json&)> check;
};

class Gateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit Gateway(std::shared_ptr<CompletionProvider> provider, GatewayBudget budget = {},
                   Sleeper sleeper = {});

  // assemble -> complete -> extract_json -> validate, up to max_attempts.
  // Throws exhausted_attempts (detail carries the trace) when no attempt
  // validates; provider_unreachable and timeout surface as themselves once
  // the budget is spent; missing_fixture surfaces immediately.
  GatewayResult complete_validated(TemplateId id, const Bindings& bindings,
                                   const GatewayHooks& hooks = {}) const;

  CompletionProvider& provider() const noexcept { return *provider_; }
  const GatewayBudget& budget() const noexcept { return budget_; }

  // Delay before attempt `next_attempt` (2, 3, ...): 250 ms, then 1 s, then
  // 4 s and so on. Deterministic providers never wait.
  static std::chrono::milliseconds backoff(int next_attempt) noexcept;

 private:
  std::shared_ptr<CompletionProvider> provider_;
  GatewayBudget budget_;
  Sleeper sleeper_;
};

}  // namespace duet
