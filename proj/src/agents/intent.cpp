#include "duet/agents/intent.hpp"

#include <map>

#include "duet/schema/codec.hpp"

namespace duet {

namespace {

std::string value_text(const Json& v) {
  return v.is_string() ? v.get<std::string>() : canonical_dump(v);
}

bool is_budget_key(const std::string& key) {
  return key.find("budget") != std::string::npos || key.find("price") != std::string::npos;
}

}  // namespace

std::string_view to_string(IntentKind kind) noexcept {
  switch (kind) {
    case IntentKind::preference_set: return "preference_set";
    case IntentKind::reorder: return "reorder";
    case IntentKind::favorite: return "favorite";
    case IntentKind::budget_change: return "budget_change";
    case IntentKind::confirm: return "confirm";
    case IntentKind::navigate_pattern: return "navigate_pattern";
  }
  return "preference_set";
}

std::string_view to_string(Confidence c) noexcept { return c == Confidence::high ? "high" : "low"; }

Json IntentSignal::to_json() const {
  return Json{{"kind", std::string(duet::to_string(kind))},
              {"evidence", evidence},
              {"inference", inference},
              {"confidence", std::string(duet::to_string(confidence))}};
}

Json to_json(const std::vector<IntentSignal>& signals) {
  Json out = Json::array();
  for (const auto& s : signals) out.push_back(s.to_json());
  return out;
}

std::vector<ActionRecord> intent_window(const std::vector<ActionRecord>& history) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i].kind == ActionKind::agent_commit_task) start = i + 1;
  }
  return {history.begin() + static_cast<std::ptrdiff_t>(start), history.end()};
}

std::vector<IntentSignal> infer_intents(const std::vector<ActionRecord>& window) {
  std::vector<IntentSignal> out;
  std::map<std::string, std::vector<std::int64_t>> visits;
  std::vector<std::string> visit_order;

  for (const auto& r : window) {
    if (r.actor != Actor::user) continue;
    const Json& p = r.payload;
    const auto key = r.value_key().value_or("");
    switch (r.kind) {
      case ActionKind::input:
      case ActionKind::select:
      case ActionKind::slide:
      case ActionKind::pick_date: {
        if (!p.is_object() || !p.contains("value")) break;
        const bool budget = r.kind == ActionKind::slide || is_budget_key(key);
        IntentSignal s;
        s.kind = budget ? IntentKind::budget_change : IntentKind::preference_set;
        s.evidence = {r.seq};
        s.inference = "sets " + (key.empty() ? std::string(budget ? "budget" : "a value") : key) +
                      " to " + value_text(p["value"]);
        s.confidence = r.kind == ActionKind::input ? Confidence::low : Confidence::high;
        out.push_back(std::move(s));
        break;
      }
      case ActionKind::reorder: {
        IntentSignal s{IntentKind::reorder, {r.seq}, "prefers step order", Confidence::high};
        if (p.is_object() && p.contains("new_order")) {
          s.inference = "prefers step order " + canonical_dump(p["new_order"]);
        }
        out.push_back(std::move(s));
        break;
      }
      case ActionKind::favorite: {
        std::string what = p.is_object() && p.contains("itemId") ? value_text(p["itemId"]) : "an item";
        out.push_back({IntentKind::favorite, {r.seq}, "is interested in " + what, Confidence::low});
        break;
      }
      case ActionKind::confirm: {
        std::string what = p.is_object() && p.contains("itemId") ? value_text(p["itemId"]) : "a choice";
        out.push_back({IntentKind::confirm, {r.seq}, "commits to " + what, Confidence::high});
        break;
      }
      case ActionKind::navigate: {
        if (!r.target) break;
        auto& seqs = visits[r.target->page_state_id];
        if (seqs.empty()) visit_order.push_back(r.target->page_state_id);
        seqs.push_back(r.seq);
        break;
      }
      default: break;
    }
  }
  for (const auto& page : visit_order) {
    const auto& seqs = visits[page];
    if (seqs.size() < 2) continue;
    out.push_back({IntentKind::navigate_pattern, seqs,
                   "keeps returning to " + page, Confidence::low});
  }
  return out;
}

}  // namespace duet
