#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "duet/schema/actions.hpp"

namespace duet {

enum class IntentKind { preference_set, reorder, favorite, budget_change, confirm, navigate_pattern };
enum class Confidence { low, high };

std::string_view to_string(IntentKind kind) noexcept;
std::string_view to_string(Confidence c) noexcept;

struct IntentSignal {
  IntentKind kind = IntentKind::preference_set;
  std::vector<std::int64_t> evidence;  // seqs inside the analyzed window
  std::string inference;
  Confidence confidence = Confidence::low;

  Json to_json() const;
  bool operator==(const IntentSignal&) const = default;
};

Json to_json(const std::vector<IntentSignal>& signals);

// Records after the most recent agent_commit_task (the whole history when
// there is none).
std::vector<ActionRecord> intent_window(const std::vector<ActionRecord>& history);

// Rule-based reading of user records in a window, in seq order. Repeated
// navigation to one page (two or more visits) becomes a navigate_pattern.
std::vector<IntentSignal> infer_intents(const std::vector<ActionRecord>& window);

}  // namespace duet
