// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "duet/agents/interface_agent.hpp"
#include "duet/schema/codec.hpp"
#include "duet/schema/duality.hpp"
#include "duet/service/persistence.hpp"
#include "duet/service/replay.hpp"
#include "support.hpp"

using namespace duet;
using namespace duet::test;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Forwards to an inner provider and logs every exchange.
class RecordingProvider final : public CompletionProvider {
 public:
  explicit RecordingProvider(std::shared_ptr<CompletionProvider> inner) : inner_(std::move(inner)) {}
  std::string name() const override { return inner_->name(); }
  bool deterministic() const override { return inner_->deterministic(); }
  std::string complete(const CompletionRequest& request) override {
    const auto reply = inner_->complete(request);
    std::lock_guard lock(mu_);
    log_.push_back(Json{{"template", std::string(to_string(request.template_id))},
                        {"attempt", request.attempt},
                        {"prompt", request.prompt},
                        {"reply", reply}});
    return reply;
  }
  Json log() const {
    std::lock_guard lock(mu_);
    return Json(log_);
  }

 private:
  std::shared_ptr<CompletionProvider> inner_;
  mutable std::mutex mu_;
  std::vector<Json> log_;
};

std::set<std::string> navigable_pages(const TaskDecomposition& plan) {
  std::set<std::string> out;
  for (const auto& s : plan.subtasks) {
    if (s.page_type && s.page_state_id && *s.page_type != PageType::summary &&
        *s.page_type != PageType::confirmation) {
      out.insert(*s.page_state_id);
    }
  }
  return out;
}

Outcome golden_replay() {
  Outcome out;
  const auto start = Clock::now();
  // The scripted provider never opens a socket; a replay that needed the
  // network would fail with missing_fixture.
  const auto report = replay_files(barcelona_trace());
  const double took = seconds_since(start);
  if (!report.passed) out.fail("replay reported a failed step");
  if (took >= 10.0) out.fail("took " + std::to_string(took) + " s");
  out.detail = out.ok ? std::to_string(report.doc["steps"].size()) + " steps in " + std::to_string(took) + " s"
                      : out.detail;
  return out;
}

Outcome duality_suite() {
  Outcome out;
  const auto start = Clock::now();
  std::mt19937_64 rng(500);
  auto gw = quiet_gateway(fallback_provider());
  const AgentEnv env{*gw, *shipped_catalog()};
  int drop_checked = 0;
  int orphan_checked = 0;
  for (int i = 0; i < 500 && out.ok; ++i) {
    const auto plan = random_plan(rng, 10);
    auto ui = interface_agent_step(plan_snapshot(plan), env).ui;
    if (!check_duality(plan, ui).empty()) {
      out.fail("plan " + std::to_string(i) + " not dual: " + check_duality(plan, ui).to_json().dump());
      break;
    }

    // Dropping a navigation page.
    if (!ui.navigation.page_groups.empty()) {
      auto dropped = ui;
      auto& g = dropped.navigation.page_groups[rng() % dropped.navigation.page_groups.size()];
      g.pages.erase(g.pages.begin() + static_cast<long>(rng() % g.pages.size()));
      auto& groups = dropped.navigation.page_groups;
      groups.erase(std::remove_if(groups.begin(), groups.end(), [](const PageGroup& pg) { return pg.pages.empty(); }),
                   groups.end());
      if (check_duality(plan, dropped).empty()) out.fail("dropped page undetected in plan " + std::to_string(i));
      ++drop_checked;
    }

    // A new page-bearing subtask the interface knows nothing about.
    auto orphaned = plan;
    orphaned.subtasks.push_back(make_subtask("orphan", static_cast<std::int64_t>(plan.subtasks.size() + 1), PageType::list));
    if (check_duality(orphaned, ui).empty()) out.fail("orphan subtask undetected in plan " + std::to_string(i));
    ++orphan_checked;
  }
  const double took = seconds_since(start);
  if (took >= 30.0) out.fail("took " + std::to_string(took) + " s");
  if (out.ok) {
    out.detail = "500 plans, " + std::to_string(drop_checked) + " drops, " + std::to_string(orphan_checked) +
                 " orphans in " + std::to_string(took) + " s";
  }
  return out;
}

Outcome history_laws() {
  Outcome out;
  const auto result = history_fuzz(1000, 1000);
  if (result.violation) out.fail(*result.violation);
  else out.detail = "1000 ops, " + std::to_string(result.records) + " records";
  return out;
}

Outcome navigation_caps() {
  Outcome out;
  std::mt19937_64 rng(15);
  for (int i = 0; i < 200 && out.ok; ++i) {
    TaskDecomposition plan;
    const int n = 1 + static_cast<int>(rng() % 15);
    for (int k = 0; k < n; ++k) {
      auto s = make_subtask("t" + std::to_string(k), k + 1, PageType::list);
      if (k > 0 && rng() % 2 == 0) s.dependent_subtasks.push_back("t" + std::to_string(rng() % k));
      plan.subtasks.push_back(s);
    }
    const auto nav = heuristic_navigation(plan);
    std::size_t total = 0;
    if (nav.page_groups.size() > 3) out.fail(std::to_string(nav.page_groups.size()) + " groups");
    for (const auto& g : nav.page_groups) {
      if (g.pages.size() > 5) out.fail("group of " + std::to_string(g.pages.size()));
      total += g.pages.size();
    }
    if (total > 15 || total != static_cast<std::size_t>(n)) out.fail("page total " + std::to_string(total));
  }

  TaskDecomposition sixteen;
  for (int k = 0; k < 16; ++k) sixteen.subtasks.push_back(make_subtask("t" + std::to_string(k), k + 1, PageType::list));
  auto gw = quiet_gateway(fallback_provider());
  try {
    interface_agent_step(plan_snapshot(sixteen), AgentEnv{*gw, *shipped_catalog()});
    out.fail("16 navigable subtasks accepted");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::capacity_exceeded) out.fail(std::string("raised ") + std::string(to_string(e.code())));
  }
  if (out.ok) out.detail = "200 plans within caps, 16 subtasks refused";
  return out;
}

// Hand-written corpus: model, expected favorites, expected sort.
struct CardCase {
  Json model;
  bool favorites;
  bool sort;
};

Outcome cardview_rules() {
  const std::vector<CardCase> corpus = {
      {{{"title", "s"}, {"price", 1}}, false, true},
      {{{"title", "s"}, {"prices", 1}}, false, true},
      {{{"title", "s"}, {"rating", 1}}, false, true},
      {{{"title", "s"}, {"star_ratings", 1}}, false, true},
      {{{"title", "s"}, {"departureDate", 1}}, false, true},
      {{{"title", "s"}, {"dates", 1}}, false, true},
      {{{"title", "s"}, {"booking", 1}}, true, false},
      {{{"title", "s"}, {"bookable", 1}}, true, false},
      {{{"title", "s"}, {"savedAt", 1}}, true, false},
      {{{"title", "s"}, {"savings", 1}}, true, false},
      {{{"productId", "s"}, {"name", "s"}}, true, false},
      {{{"product_price", 1}}, true, true},
      {{{"bookingDate", 1}, {"rating", 1}}, true, true},
      {{{"pricey", 1}, {"title", "s"}}, false, false},
      {{{"update", 1}, {"candidates", 1}}, false, false},
      {{{"notebook", 1}, {"unsaved", 1}}, false, false},
      {{{"cuisine", "s"}, {"distance", 1}}, false, false},
      {{{"id", "s"}, {"title", "s"}, {"stars", 1}}, false, false},
      {{{"reproduction", 1}, {"appraisal", 1}}, false, false},
      {{{"Price", 1}, {"SAVE", 1}}, true, true},
  };
  Outcome out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& c = corpus[i];
    if (favorites_rule(c.model) != c.favorites) out.fail("favorites mismatch on " + c.model.dump());
    if (sort_rule(c.model) != c.sort) out.fail("sort mismatch on " + c.model.dump());
  }
  if (out.ok) out.detail = std::to_string(corpus.size()) + " models agree";
  return out;
}

Outcome gateway_determinism() {
  Outcome out;
  // Every exchange of the golden replay, five times over.
  std::string first;
  int max_attempt = 0;
  for (int run = 0; run < 5; ++run) {
    auto recorder = std::make_shared<RecordingProvider>(ScriptedProvider::from_directory(barcelona_fixtures()));
    Replayer r(Trace::load(barcelona_trace()), recorder, shipped_catalog());
    const auto report = r.run();
    const auto bytes = canonical_dump(recorder->log()) + report.bytes();
    if (run == 0) first = bytes;
    else if (bytes != first) out.fail("run " + std::to_string(run) + " differs");
    for (const auto& e : recorder->log()) max_attempt = std::max(max_attempt, e["attempt"].get<int>());
  }
  if (max_attempt > GatewayBudget{}.max_attempts) out.fail("attempt " + std::to_string(max_attempt) + " over budget");

  // The four-group proposal is repaired on attempt 2.
  std::string repair_first;
  for (int run = 0; run < 5; ++run) {
    auto provider = std::make_shared<LambdaProvider>(
        [](const CompletionRequest& r) { return navigation_doc(r.attempt == 1 ? 4 : 3).dump(); });
    const auto result = quiet_gateway(provider)->complete_validated(
        TemplateId::navigation_gen, {{"task_decomposition_json", R"({"goal":"g","subtasks":[]})"}});
    if (result.trace.size() != 2 || result.trace[0].ok() || !result.trace[1].ok() ||
        result.value["pageGroups"].size() != 3) {
      out.fail("4-group proposal not repaired on attempt 2");
    }
    const auto bytes = canonical_dump(result.trace_json());
    if (run == 0) repair_first = bytes;
    else if (bytes != repair_first) out.fail("repair trace differs on run " + std::to_string(run));
  }
  if (out.ok) out.detail = "5 identical runs, max attempt " + std::to_string(max_attempt) + ", 4->3 repaired on attempt 2";
  return out;
}

Outcome save_load() {
  Outcome out;
  const auto trace = Trace::load(barcelona_trace());
  std::mt19937_64 rng(100);
  for (int i = 0; i < 100 && out.ok; ++i) {
    const std::size_t stop = rng() % (trace.steps.size() + 1);
    Replayer r(trace, ScriptedProvider::from_directory(barcelona_fixtures()), shipped_catalog());
    for (std::size_t k = 0; k < stop && r.step(); ++k) {
    }
    const auto id = r.session_id();
    const auto bytes = serialize(save_session(r.context(), id, 1));
    ContextManager fresh;
    load_session(fresh, parse_persisted_session(bytes));
    if (fresh.snapshot(id).hash() != r.context().snapshot(id).hash()) {
      out.fail("hash differs after step " + std::to_string(stop));
    }
    if (serialize(save_session(fresh, id, 1)) != bytes) out.fail("re-save differs after step " + std::to_string(stop));
  }
  if (replay_files(barcelona_trace()).bytes() != replay_files(barcelona_trace()).bytes()) {
    out.fail("replay bytes differ");
  }
  if (out.ok) out.detail = "100 states round-trip, replay byte-identical";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"golden-replay", golden_replay},     {"duality", duality_suite},
      {"history-laws", history_laws},       {"navigation-caps", navigation_caps},
      {"cardview-rules", cardview_rules},   {"gateway-determinism", gateway_determinism},
      {"save-load", save_load},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("threw: ") + e.what());
    }
    std::printf("%s %s: %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    if (!o.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
