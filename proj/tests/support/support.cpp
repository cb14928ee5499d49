#include "support.hpp"

#include <algorithm>

#include "duet/context/laws.hpp"
#include "duet/llm/templates.hpp"
#include "duet/loop/orchestrator.hpp"
#include "duet/schema/codec.hpp"

namespace duet::test {

std::filesystem::path source_dir() { return DUET_TEST_SOURCE_DIR; }
std::filesystem::path catalog_dir() { return source_dir() / "catalog"; }
std::filesystem::path barcelona_fixtures() { return source_dir() / "fixtures" / "barcelona"; }
std::filesystem::path barcelona_trace() { return source_dir() / "traces" / "barcelona.trace"; }

std::shared_ptr<const Catalog> shipped_catalog() {
  static const auto catalog = std::make_shared<const Catalog>(Catalog::load_directory(catalog_dir()));
  return catalog;
}

Subtask make_subtask(const std::string& id, std::int64_t step, std::optional<PageType> type,
                     const std::string& api) {
  Subtask s;
  s.subtask_name = "Step " + id;
  s.subtask_id = id;
  s.step_id = step;
  s.matched_apis.push_back(AvailableApi{api, Json::object(), Json::object()});
  if (type) {
    s.page_type = type;
    s.page_state_id = "page-" + id;
  }
  return s;
}

TaskDecomposition random_plan(std::mt19937_64& rng, std::size_t max_subtasks) {
  std::uniform_int_distribution<std::size_t> count(0, max_subtasks);
  std::uniform_int_distribution<int> roll(0, 99);
  static const PageType kNavigable[] = {PageType::list, PageType::detail, PageType::form};

  TaskDecomposition plan;
  plan.goal = "random goal";
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const int r = roll(rng);
    std::optional<PageType> type;
    if (r < 10) {
      type = std::nullopt;
    } else if (r < 20) {
      type = PageType::summary;
    } else if (r < 28) {
      type = PageType::confirmation;
    } else {
      type = kNavigable[static_cast<std::size_t>(r) % 3];
    }
    Subtask s = make_subtask("t" + std::to_string(i), static_cast<std::int64_t>(i + 1), type);
    for (std::size_t j = 0; j < i; ++j) {
      if (roll(rng) < 15) s.dependent_subtasks.push_back("t" + std::to_string(j));
    }
    plan.subtasks.push_back(std::move(s));
  }
  return plan;
}

ContextSnapshot plan_snapshot(const TaskDecomposition& plan, TaskStage stage) {
  ContextSnapshot snap;
  snap.session_id = "s-test";
  snap.goal = plan.goal.empty() ? "goal" : plan.goal;
  snap.stage = stage;
  snap.task_version = 1;
  snap.task.plan = plan;
  ActionRecord goal;
  goal.seq = 1;
  goal.kind = ActionKind::input;
  goal.payload = Json{{"value", snap.goal}, {"valueKey", "goal"}};
  goal.at = 1;
  snap.history.push_back(goal);
  snap.last_seq = 1;
  return snap;
}

std::string LambdaProvider::complete(const CompletionRequest& request) {
  ++calls_;
  attempts_.push_back(request.attempt);
  return reply_(request);
}

std::shared_ptr<CompletionProvider> fallback_provider() {
  return std::make_shared<LambdaProvider>([](const CompletionRequest& request) -> std::string {
    if (request.template_id != TemplateId::summary_gen) return "no structure here";
    const Json pages = Json::parse(request.bindings->at("live_pages_json"));
    Json summary{{"content", "Overview."},
                 {"dashboardConfig",
                  {{"items", Json::array({Json{{"id", "pages"},
                                               {"label", "Pages"},
                                               {"value", pages.size()},
                                               {"type", "number"}}})}}}};
    if (!pages.empty()) {
      summary["content"] = "Overview.\n\n{{nav-block:first}}";
      summary["navigationBlocks"] = {
          {"first", {{"pageStateId", pages[0]["pageStateId"]}, {"title", "Start here"}}}};
    }
    return summary.dump();
  });
}

std::shared_ptr<Gateway> quiet_gateway(std::shared_ptr<CompletionProvider> provider,
                                       GatewayBudget budget) {
  return std::make_shared<Gateway>(std::move(provider), budget, [](std::chrono::milliseconds) {});
}

Json navigation_doc(std::size_t groups) {
  Json out{{"pageGroups", Json::array()}};
  for (std::size_t i = 0; i < groups; ++i) {
    const std::string id = "page-g" + std::to_string(i);
    out["pageGroups"].push_back(Json{{"groupname", "Group " + std::to_string(i)},
                                     {"groupicon", "list"},
                                     {"pages", Json::array({Json{{"pagename", id}, {"pageStateId", id}}})}});
  }
  return out;
}

std::shared_ptr<CompletionProvider> random_plan_provider(std::uint64_t seed) {
  auto fallback = fallback_provider();
  return std::make_shared<LambdaProvider>([seed, fallback](const CompletionRequest& request) {
    if (request.template_id != TemplateId::task_decompose) return fallback->complete(request);
    const std::string fp = bindings_fingerprint(*request.bindings);
    std::mt19937_64 rng(seed ^ std::stoull(fp, nullptr, 16));
    TaskDecomposition plan = random_plan(rng);
    plan.goal = request.bindings->at("user_goal_text");
    return canonical_dump(to_json(plan));
  });
}

FuzzOutcome history_fuzz(std::uint64_t seed, std::size_t ops) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  ContextManager cm(std::make_shared<ManualClock>(), sequential_id_generator());
  Orchestrator orch(cm, quiet_gateway(random_plan_provider(seed)), shipped_catalog(),
                    OrchestratorOptions{true, 1, std::chrono::milliseconds(10'000), 3});
  const std::string id = orch.create_session("fuzz goal");

  FuzzOutcome out;
  std::vector<ActionRecord> previous = cm.snapshot(id).history;
  auto check = [&](std::size_t op) -> bool {
    const auto h = cm.snapshot(id).history;
    std::optional<std::string> v;
    if (!v) v = check_gapless(h);
    if (!v) v = check_prefix(previous, h);
    if (!v) v = check_version_monotonicity(h);
    if (!v) v = check_loop_ordering(h, true);
    if (v) {
      out.violation = "op " + std::to_string(op) + ": " + *v;
      return false;
    }
    previous = h;
    return true;
  };
  if (!check(0)) return out;

  for (std::size_t op = 1; op <= ops; ++op) {
    const auto snap = cm.snapshot(id);
    const int roll = static_cast<int>(pick(100));
    try {
      if (roll < 8) {
        // legal stage move: forward one, or back anywhere
        const int at = stage_index(snap.stage);
        std::vector<TaskStage> targets;
        if (at + 1 < kStageCount) targets.push_back(static_cast<TaskStage>(at + 1));
        for (int s = 0; s < at; ++s) targets.push_back(static_cast<TaskStage>(s));
        // bias forward so the fuzz reaches the later stages
        const TaskStage target = (pick(3) != 0 && at + 1 < kStageCount) ? targets.front() : targets[pick(targets.size())];
        orch.advance_stage(id, target);
      } else if (roll < 16 && snap.task.plan.subtasks.size() > 1 && !snap.ui.pages.empty()) {
        std::vector<std::string> order;
        for (const auto& s : snap.task.plan.subtasks) order.push_back(s.subtask_id);
        std::vector<std::string> shuffled = order;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        orch.submit_action(id, ActionDraft{Actor::user, ActionKind::reorder,
                                           ActionTarget{snap.ui.pages.begin()->first, {}, {}},
                                           Json{{"old_order", order}, {"new_order", shuffled}}});
      } else if (!snap.ui.pages.empty()) {
        auto page = snap.ui.pages.begin();
        std::advance(page, static_cast<std::ptrdiff_t>(pick(snap.ui.pages.size())));
        const auto comps = snap.ui.components.find(page->first);
        const Component* c = nullptr;
        if (comps != snap.ui.components.end() && !comps->second.empty()) {
          c = &comps->second[pick(comps->second.size())];
        }
        ActionDraft d{Actor::user, ActionKind::navigate, ActionTarget{page->first, {}, {}}, Json::object()};
        if (c && roll < 60) {
          d.target->component_id = c->component_id;
          if (auto key = c->value_key()) {
            d.kind = ActionKind::input;
            d.target->value_key = key;
            d.payload = Json{{"valueKey", *key}, {"value", "v" + std::to_string(pick(5))}};
          } else {
            d.kind = ActionKind::click;
          }
        }
        orch.submit_action(id, d);
      } else {
        orch.advance_stage(id, TaskStage::define);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::illegal_transition && e.code() != ErrorCode::dangling_target) {
        out.violation = "op " + std::to_string(op) + " threw " + std::string(to_string(e.code())) + ": " + e.what();
        return out;
      }
    }
    if (!check(op)) return out;
  }

  const auto h = cm.snapshot(id).history;
  out.records = h.size();
  for (const auto& r : h) {
    if (r.kind == ActionKind::agent_commit_task) ++out.task_commits;
    if (r.kind == ActionKind::agent_commit_interface) ++out.interface_commits;
  }
  return out;
}

}  // namespace duet::test
