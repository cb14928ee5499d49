#include <algorithm>
#include <set>

#include "doctest.h"
#include "duet/agents/intent.hpp"
#include "duet/agents/interface_agent.hpp"
#include "duet/agents/service_agent.hpp"
#include "duet/agents/summary_agent.hpp"
#include "duet/agents/task_agent.hpp"
#include "duet/schema/codec.hpp"
#include "duet/schema/duality.hpp"
#include "duet/service/replay.hpp"
#include "support.hpp"

using namespace duet;
using duet::test::fallback_provider;
using duet::test::LambdaProvider;
using duet::test::make_subtask;
using duet::test::plan_snapshot;
using duet::test::quiet_gateway;
using duet::test::shipped_catalog;

namespace {

constexpr const char* kGoal = "I want to go to Barcelona for a trip";

ActionRecord record(std::int64_t seq, Actor actor, ActionKind kind, Json payload,
                    std::optional<ActionTarget> target = std::nullopt) {
  ActionRecord r;
  r.seq = seq;
  r.actor = actor;
  r.kind = kind;
  r.payload = std::move(payload);
  r.target = std::move(target);
  r.at = seq;
  return r;
}

TaskDecomposition trip_plan() {
  TaskDecomposition p;
  p.goal = kGoal;
  p.subtasks = {make_subtask("transport", 1, PageType::form, "collect_preferences"),
                make_subtask("flights", 2, PageType::list, "search_flights"),
                make_subtask("itinerary", 3, PageType::list, "build_itinerary"),
                make_subtask("accommodation", 4, PageType::list, "search_accommodation")};
  return p;
}

// Echoes `plan` for every planner call.
std::shared_ptr<LambdaProvider> echo_planner(const TaskDecomposition& plan) {
  const std::string body = canonical_dump(to_json(plan));
  return std::make_shared<LambdaProvider>([body](const CompletionRequest&) { return body; });
}

ContextSnapshot barcelona_final() {
  static const Json state = replay_files(duet::test::barcelona_trace()).final_state;
  return snapshot_from_json(state);
}

std::vector<std::string> ids_of(const TaskDecomposition& plan) {
  std::vector<std::string> out;
  for (const auto& s : plan.subtasks) out.push_back(s.subtask_id);
  return out;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::assertion_failed;
}

}  // namespace

TEST_SUITE("agents") {

// ---- task agent ------------------------------------------------------------------

TEST_CASE("airplane select biases the plan and surfaces a preference") {
  auto snap = plan_snapshot(trip_plan());
  snap.goal = kGoal;
  snap.history.push_back(record(2, Actor::agent, ActionKind::agent_commit_task, Json{{"taskVersion", 1}}));
  snap.history.push_back(record(3, Actor::user, ActionKind::select, Json{{"valueKey", "transport"}, {"value", "airplane"}},
                                ActionTarget{"page-transport", "field:transport", "transport"}));
  snap.last_seq = 3;
  const auto hash = snap.hash();

  auto gw = quiet_gateway(echo_planner(trip_plan()));
  const auto out = task_agent_step(snap, AgentEnv{*gw, *shipped_catalog()});
  const Subtask* flights = out.plan.find("flights");
  REQUIRE(flights);
  CHECK(flights->matched_apis[0].payload["transport_mode"] == "airplane");
  CHECK(out.plan.find("transport")->matched_apis[0].payload["transport_mode"] == "airplane");
  // build_itinerary has no transport param
  CHECK_FALSE(out.plan.find("itinerary")->matched_apis[0].payload.contains("transport_mode"));

  const auto it = std::find_if(out.signals.begin(), out.signals.end(),
                               [](const IntentSignal& s) { return s.kind == IntentKind::preference_set; });
  REQUIRE(it != out.signals.end());
  CHECK(it->evidence == std::vector<std::int64_t>{3});
  CHECK(it->inference.find("airplane") != std::string::npos);
  CHECK(snap.hash() == hash);
}

TEST_CASE("the user's reorder wins over the planner") {
  auto snap = plan_snapshot(trip_plan());
  snap.history.push_back(record(2, Actor::user, ActionKind::reorder,
                                Json{{"old_order", {"transport", "flights", "itinerary", "accommodation"}},
                                     {"new_order", {"transport", "flights", "accommodation", "itinerary"}}}));
  auto gw = quiet_gateway(echo_planner(trip_plan()));
  const auto out = task_agent_step(snap, AgentEnv{*gw, *shipped_catalog()});
  CHECK(out.plan.find("accommodation")->step_id < out.plan.find("itinerary")->step_id);
  CHECK(ids_of(out.plan) == std::vector<std::string>{"transport", "flights", "accommodation", "itinerary"});
  for (std::size_t i = 0; i < out.plan.subtasks.size(); ++i) CHECK(out.plan.subtasks[i].step_id == static_cast<std::int64_t>(i + 1));
}

TEST_CASE("planner step ids are renumbered") {
  TaskDecomposition raw;
  raw.goal = kGoal;
  raw.subtasks = {make_subtask("b", 9, PageType::list, "search_flights"),
                  make_subtask("a", 2, PageType::list, "search_attractions"),
                  make_subtask("c", 40, PageType::summary, "summarize_trip")};
  auto gw = quiet_gateway(echo_planner(raw));
  const auto out = task_agent_step(plan_snapshot(TaskDecomposition{kGoal, {}, Json::object()}),
                                   AgentEnv{*gw, *shipped_catalog()});
  // Oracle: sort by the proposed step id, then index from 1.
  CHECK(ids_of(out.plan) == std::vector<std::string>{"a", "b", "c"});
  CHECK(out.plan.subtasks[0].step_id == 1);
  CHECK(out.plan.subtasks[1].step_id == 2);
  CHECK(out.plan.subtasks[2].step_id == 3);
}

TEST_CASE("before Plan the planner proposes one clarification") {
  auto gw = quiet_gateway(echo_planner(trip_plan()));
  const auto out = task_agent_step(plan_snapshot(TaskDecomposition{kGoal, {}, Json::object()}, TaskStage::empathize),
                                   AgentEnv{*gw, *shipped_catalog()});
  CHECK(out.plan.subtasks.size() == 1);
}

TEST_CASE("an empty plan from Plan on is an error") {
  auto gw = quiet_gateway(echo_planner(TaskDecomposition{kGoal, {}, Json::object()}));
  CHECK(code_of([&] { task_agent_step(plan_snapshot(trip_plan()), AgentEnv{*gw, *shipped_catalog()}); }) ==
        ErrorCode::empty_plan);
}

TEST_CASE("unknown apis from the planner are repaired, then fail") {
  TaskDecomposition bad = trip_plan();
  bad.subtasks[1].matched_apis[0].api_name = "teleport";
  auto provider = echo_planner(bad);
  auto gw = quiet_gateway(provider);
  CHECK(code_of([&] { task_agent_step(plan_snapshot(trip_plan()), AgentEnv{*gw, *shipped_catalog()}); }) ==
        ErrorCode::exhausted_attempts);
  CHECK(provider->calls() == 3);
  CHECK(check_known_apis(to_json(bad)["subtasks"], *shipped_catalog(), "/subtasks").size() == 1);
}

TEST_CASE("apply_reorder keeps unnamed subtasks in place") {
  TaskDecomposition p = trip_plan();
  apply_reorder(p, {"accommodation", "transport"});
  CHECK(ids_of(p) == std::vector<std::string>{"accommodation", "flights", "itinerary", "transport"});
  CHECK(latest_reorder({}) == std::nullopt);
}

TEST_CASE("subtask_refine") {
  const TaskDecomposition plan = trip_plan();
  auto catalog = shipped_catalog();

  SUBCASE("a filtering call grows matched_apis") {
    Subtask refined = *plan.find("accommodation");
    refined.matched_apis.push_back(AvailableApi{"search_attractions", Json{{"near", "Sagrada Família"}}, Json::object()});
    const std::string body = canonical_dump(to_json(refined));
    auto gw = quiet_gateway(std::make_shared<LambdaProvider>([&](const CompletionRequest& r) {
      CHECK(r.bindings->at("refinement_instruction_text") == "Add a filtering API call to this step");
      return body;
    }));
    const auto out = subtask_refine(plan, "accommodation", "Add a filtering API call to this step", AgentEnv{*gw, *catalog});
    CHECK(out.matched_apis.size() == plan.find("accommodation")->matched_apis.size() + 1);
    for (const auto& call : out.matched_apis) CHECK(catalog->find_api(call.api_name));
  }

  SUBCASE("page type changes keep ids") {
    Json proposal = to_json(*plan.find("flights"));
    proposal["page_type"] = "detail";
    proposal["page_state_id"] = "page-renamed";
    proposal["subtask_id"] = "renamed";
    proposal["step_id"] = 7;
    auto gw = quiet_gateway(std::make_shared<LambdaProvider>([&](const CompletionRequest&) { return proposal.dump(); }));
    const auto out = subtask_refine(plan, "flights", "Change the page type to 'detail'", AgentEnv{*gw, *catalog});
    CHECK(out.page_type == PageType::detail);
    CHECK(out.page_state_id == std::optional<std::string>("page-flights"));
    CHECK(out.subtask_id == "flights");
    CHECK(out.step_id == 2);
  }

  SUBCASE("blank instructions are the identity") {
    auto provider = std::make_shared<LambdaProvider>([](const CompletionRequest&) { return std::string("{}"); });
    auto gw = quiet_gateway(provider);
    CHECK(subtask_refine(plan, "flights", "  ", AgentEnv{*gw, *catalog}) == *plan.find("flights"));
    CHECK(provider->calls() == 0);
  }

  SUBCASE("unknown subtasks") {
    auto gw = quiet_gateway(fallback_provider());
    CHECK(code_of([&] { subtask_refine(plan, "nope", "x", AgentEnv{*gw, *catalog}); }) == ErrorCode::unknown_subtask);
  }
}

// ---- intents -----------------------------------------------------------------------

TEST_CASE("intent window starts after the last task commit") {
  std::vector<ActionRecord> h{record(1, Actor::user, ActionKind::input, Json{{"value", "g"}}),
                              record(2, Actor::agent, ActionKind::agent_commit_task, Json{{"taskVersion", 1}}),
                              record(3, Actor::user, ActionKind::navigate, Json::object(), ActionTarget{"page-a", {}, {}}),
                              record(4, Actor::user, ActionKind::navigate, Json::object(), ActionTarget{"page-a", {}, {}}),
                              record(5, Actor::user, ActionKind::slide, Json{{"valueKey", "budget"}, {"value", 1000}})};
  const auto window = intent_window(h);
  REQUIRE(window.size() == 3);
  CHECK(window.front().seq == 3);
  const auto signals = infer_intents(window);
  std::multiset<IntentKind> kinds;
  for (const auto& s : signals) kinds.insert(s.kind);
  CHECK(kinds.count(IntentKind::navigate_pattern) == 1);
  CHECK(kinds.count(IntentKind::budget_change) == 1);
  for (const auto& s : signals) {
    for (auto seq : s.evidence) CHECK((seq >= 3 && seq <= 5));
  }
}

// ---- interface agent -----------------------------------------------------------

TEST_CASE("two connected subtasks give one group and two pages") {
  TaskDecomposition plan;
  plan.goal = kGoal;
  plan.subtasks = {make_subtask("a", 1, PageType::form), make_subtask("b", 2, PageType::detail)};
  plan.subtasks[1].dependent_subtasks = {"a"};
  auto gw = quiet_gateway(fallback_provider());
  const auto snap = plan_snapshot(plan);
  const auto out = interface_agent_step(snap, AgentEnv{*gw, *shipped_catalog()});
  CHECK(out.navigation_fallback);
  REQUIRE(out.ui.navigation.page_groups.size() == 1);
  CHECK(out.ui.navigation.page_count() == 2);
  CHECK(out.ui.pages.size() == 2);
  CHECK(check_duality(plan, out.ui.navigation, out.ui.pages, out.ui.components).empty());
}

TEST_CASE("a one-group model proposal is accepted as is") {
  TaskDecomposition plan;
  plan.goal = kGoal;
  plan.subtasks = {make_subtask("a", 1, PageType::form), make_subtask("b", 2, PageType::list)};
  Json nav{{"pageGroups", {{{"groupname", "Trip"}, {"groupicon", "map"},
                            {"pages", {{{"pagename", "A"}, {"pageStateId", "page-a"}},
                                       {{"pagename", "B"}, {"pageStateId", "page-b"}}}}}}}};
  auto gw = quiet_gateway(std::make_shared<LambdaProvider>([&](const CompletionRequest& r) -> std::string {
    if (r.template_id == TemplateId::navigation_gen) return nav.dump();
    return "nothing";
  }));
  const auto out = interface_agent_step(plan_snapshot(plan), AgentEnv{*gw, *shipped_catalog()});
  CHECK_FALSE(out.navigation_fallback);
  CHECK(out.ui.navigation.page_groups.size() == 1);
  CHECK(out.ui.navigation.page_groups[0].groupname == "Trip");
  CHECK(out.ui.pages.size() == 2);
}

TEST_CASE("summary pages are reachable but not in navigation") {
  TaskDecomposition plan;
  plan.goal = kGoal;
  plan.subtasks = {make_subtask("a", 1, PageType::list), make_subtask("sum", 2, PageType::summary, "summarize_trip")};
  auto gw = quiet_gateway(fallback_provider());
  const auto out = interface_agent_step(plan_snapshot(plan), AgentEnv{*gw, *shipped_catalog()});
  const auto nav_ids = out.ui.navigation.page_state_ids();
  CHECK(std::find(nav_ids.begin(), nav_ids.end(), "page-sum") == nav_ids.end());
  REQUIRE(out.ui.pages.count("page-sum") == 1);
  CHECK(out.ui.pages.at("page-sum").page_type == PageType::summary);
  CHECK(out.ui.find_component("page-a", "navcard:page-sum") != nullptr);
}

TEST_CASE("more than fifteen navigable subtasks exceed capacity") {
  TaskDecomposition plan;
  plan.goal = kGoal;
  for (int i = 0; i < 16; ++i) plan.subtasks.push_back(make_subtask("t" + std::to_string(i), i + 1, PageType::list));
  auto gw = quiet_gateway(fallback_provider());
  CHECK(code_of([&] { interface_agent_step(plan_snapshot(plan), AgentEnv{*gw, *shipped_catalog()}); }) ==
        ErrorCode::capacity_exceeded);
  CHECK(code_of([&] { heuristic_navigation(plan); }) == ErrorCode::capacity_exceeded);

  // Fifteen fit exactly: 3 groups of 5.
  plan.subtasks.pop_back();
  const auto nav = heuristic_navigation(plan);
  CHECK(nav.page_groups.size() == 3);
  for (const auto& g : nav.page_groups) CHECK(g.pages.size() == 5);
}

TEST_CASE("navigation bijection issues") {
  TaskDecomposition plan;
  plan.subtasks = {make_subtask("a", 1, PageType::list), make_subtask("b", 2, PageType::list)};
  Json nav{{"pageGroups", {{{"groupname", "G"}, {"groupicon", "map"},
                            {"pages", {{{"pagename", "A"}, {"pageStateId", "page-a"}},
                                       {{"pagename", "X"}, {"pageStateId", "page-x"}}}}}}}};
  // missing page-b, extra page-x
  CHECK(check_navigation_bijection(nav, plan).size() == 2);
  nav["pageGroups"][0]["pages"][1]["pageStateId"] = "page-b";
  CHECK(check_navigation_bijection(nav, plan).empty());
}

TEST_CASE("agents never touch the snapshot") {
  const auto snap = barcelona_final();
  const auto hash = snap.hash();
  auto gw = quiet_gateway(ScriptedProvider::from_directory(duet::test::barcelona_fixtures()));
  const AgentEnv env{*gw, *shipped_catalog()};
  interface_agent_step(snap, env);
  summary_agent_step(snap, env);
  CHECK(snap.hash() == hash);
}

// ---- CardView ---------------------------------------------------------------------

TEST_CASE("cardview rules") {
  const Json flight{{"id", "string"}, {"title", "string"}, {"price", "number"}, {"departure", "string"}};
  const Json lodging{{"id", "string"}, {"title", "string"}, {"booking", "string"}, {"distance", "string"}};
  const Json neither{{"id", "string"}, {"title", "string"}, {"cuisine", "string"}};
  CHECK(sort_rule(flight));
  CHECK_FALSE(favorites_rule(flight));
  CHECK(favorites_rule(lodging));
  CHECK_FALSE(sort_rule(lodging));
  CHECK_FALSE(sort_rule(neither));
  CHECK_FALSE(favorites_rule(neither));
  CHECK(model_tokens(Json{{"savedAt", 1}, {"star_rating", 1}}) == std::vector<std::string>{"saved", "at", "star", "rating"});
  CHECK(favorites_rule(Json{{"savedAt", 1}}));
  CHECK(sort_rule(Json{{"star_rating", 1}}));
  CHECK_FALSE(sort_rule(Json{{"pricey", 1}}));
}

TEST_CASE("cardview booleans override the model") {
  const Subtask s = make_subtask("flights", 1, PageType::list, "search_flights");
  const Json model{{"id", "string"}, {"title", "string"}, {"price", "number"}, {"departure", "string"}};
  Json proposal{{"pageStateId", "page-flights"}, {"itemDataKey", "items"},
                {"displayedAttributes", {"title", "price", "departure"}},
                {"enableFavorites", true}, {"isSortEnabled", false}};
  auto gw = quiet_gateway(std::make_shared<LambdaProvider>([&](const CompletionRequest&) { return proposal.dump(); }));
  const auto config = cardview_config_for(s, model, Json{{"id", "f1"}}, *gw);
  CHECK(config.is_sort_enabled);
  CHECK_FALSE(config.enable_favorites);
  CHECK(config.displayed_attributes == std::vector<std::string>{"title", "price", "departure"});
}

TEST_CASE("a two-field model cannot satisfy the attribute rule and is padded") {
  const Subtask s = make_subtask("x", 1, PageType::list);
  const Json model{{"id", "string"}, {"title", "string"}};
  Json proposal{{"pageStateId", "page-x"}, {"itemDataKey", "items"}, {"displayedAttributes", {"id", "title"}},
                {"enableFavorites", false}, {"isSortEnabled", false}};
  auto provider = std::make_shared<LambdaProvider>([&](const CompletionRequest&) { return proposal.dump(); });
  auto gw = quiet_gateway(provider);
  const auto config = cardview_config_for(s, model, Json{{"id", "1"}, {"title", "t"}}, *gw);
  CHECK(provider->calls() == 3);
  CHECK(config.displayed_attributes.size() == 3);
  CHECK(std::find(config.displayed_attributes.begin(), config.displayed_attributes.end(), "id") != config.displayed_attributes.end());
  CHECK(std::find(config.displayed_attributes.begin(), config.displayed_attributes.end(), "title") != config.displayed_attributes.end());
  CHECK(fallback_cardview(s, model) == config);
}

TEST_CASE("item models describe fields from the api data model") {
  BasicItem item;
  item.id = "f1";
  item.title = "Flight AB123";
  item.price = 89.0;
  item.extended_attributes = {AttributeDetail{"departure", "08:05", Json::object()}};
  const auto* api = shipped_catalog()->find_api("search_flights");
  const Json model = item_model({item}, api);
  CHECK(model.size() == 4);
  CHECK(model["price"] == api->data_model["price"]);
  CHECK(model.contains("departure"));
}

// ---- service agent ------------------------------------------------------------------

TEST_CASE("golden flights include AB123") {
  auto catalog = shipped_catalog();
  auto gw = quiet_gateway(ScriptedProvider::from_directory(duet::test::barcelona_fixtures()));
  const AvailableApi call{"search_flights", Json{{"transport_mode", "airplane"}, {"destination", "Barcelona"}}, Json::object()};
  const auto& task = catalog->task_for_goal(kGoal);
  const auto items = service_agent_fetch(call, task, catalog->platforms_for(catalog->api("search_flights"), task, call.payload),
                                         AgentEnv{*gw, *catalog});
  CHECK(std::any_of(items.begin(), items.end(), [](const BasicItem& i) { return i.title == "Flight AB123"; }));
  CHECK(recommended_item(items)->title == "Flight AB123");
  for (const auto& i : items) {
    if (i.image_query) CHECK(i.extra["image_url"] == "placeholder://" + *i.image_query);
  }
}

TEST_CASE("lodging near Sagrada Familia stays within budget") {
  auto catalog = shipped_catalog();
  auto gw = quiet_gateway(ScriptedProvider::from_directory(duet::test::barcelona_fixtures()));
  const AvailableApi call{"search_accommodation",
                          Json{{"city", "Barcelona"}, {"near", "Sagrada Família"}, {"max_price", 1000}}, Json::object()};
  const auto& task = catalog->task_for_goal(kGoal);
  const auto items = service_agent_fetch(call, task, {}, AgentEnv{*gw, *catalog});
  REQUIRE_FALSE(items.empty());
  for (const auto& i : items) {
    CHECK(i.attribute("distance") != nullptr);
    REQUIRE(i.price.has_value());
    CHECK(price_total(*i.price) <= 1000.0);
  }
}

TEST_CASE("unknown apis are refused before any call") {
  auto catalog = shipped_catalog();
  auto provider = std::make_shared<LambdaProvider>([](const CompletionRequest&) { return std::string("[]"); });
  auto gw = quiet_gateway(provider);
  const AvailableApi call{"teleport", Json::object(), Json::object()};
  CHECK(code_of([&] { service_agent_fetch(call, catalog->tasks().front(), {}, AgentEnv{*gw, *catalog}); }) ==
        ErrorCode::unknown_api);
  CHECK(provider->calls() == 0);
}

TEST_CASE("service data is only fetched from Explore on") {
  auto catalog = shipped_catalog();
  auto gw = quiet_gateway(ScriptedProvider::from_directory(duet::test::barcelona_fixtures()));
  const AgentEnv env{*gw, *catalog};
  TaskDecomposition plan = trip_plan();
  plan.subtasks[1].matched_apis[0].payload = Json{{"transport_mode", "airplane"}};

  const auto early = refresh_service_data(TaskState{}, plan, TaskStage::plan, kGoal, env);
  CHECK(early.service_data.empty());
  CHECK(early.records.empty());

  const auto later = refresh_service_data(TaskState{}, plan, TaskStage::explore, kGoal, env);
  CHECK(later.service_data.count("flights") == 1);
  CHECK_FALSE(later.records.empty());
  CHECK(later.records.front().kind == ActionKind::agent_search);

  // Unchanged calls keep their data without a new fetch.
  TaskState previous{plan, later.service_data};
  const auto again = refresh_service_data(previous, plan, TaskStage::explore, kGoal, env);
  CHECK(again.service_data == later.service_data);
  CHECK(again.records.empty());
}

TEST_CASE("the recommended item is the cheapest") {
  std::vector<BasicItem> items(3);
  items[0].id = "a";
  items[1].id = "b";
  items[1].price = 50.0;
  items[2].id = "c";
  items[2].price = std::vector<PriceDetail>{{"base", 30.0, Json::object()}, {"fee", 5.0, Json::object()}};
  CHECK(recommended_item(items)->id == "c");
  items[1].price.reset();
  items[2].price.reset();
  CHECK(recommended_item(items)->id == "a");
  CHECK(recommended_item({}) == nullptr);
}

// ---- summary agent ----------------------------------------------------------------

TEST_CASE("the Barcelona summary links the booked flight and stay") {
  const auto snap = barcelona_final();
  CHECK(snap.stage == TaskStage::duet);
  auto gw = quiet_gateway(ScriptedProvider::from_directory(duet::test::barcelona_fixtures()));
  const auto summary = summary_agent_step(snap, AgentEnv{*gw, *shipped_catalog()});
  REQUIRE(summary.dashboard_config.has_value());
  std::set<std::string> item_ids;
  for (const auto& i : summary.dashboard_config->items) item_ids.insert(i.id);
  CHECK(item_ids.count("budget") == 1);
  CHECK(item_ids.count("dates") == 1);
  REQUIRE(summary.navigation_blocks.has_value());
  std::set<std::string> targets;
  for (const auto& [id, block] : *summary.navigation_blocks) targets.insert(block.page_state_id);
  CHECK(targets.count("page-flights") == 1);
  CHECK(targets.count("page-accommodation") == 1);
  // every placeholder resolves to a live page
  std::set<std::string> live;
  for (const auto& p : live_pages(snap)) live.insert(p.page_state_id);
  for (const auto& id : nav_block_placeholders(summary.content)) {
    REQUIRE(summary.navigation_blocks->count(id) == 1);
    CHECK(live.count(summary.navigation_blocks->at(id).page_state_id) == 1);
  }
}

TEST_CASE("a nav-block to a missing page is repaired, then unresolvable") {
  auto provider = std::make_shared<LambdaProvider>([](const CompletionRequest&) {
    return Json{{"content", "See {{nav-block:x}}"},
                {"navigationBlocks", {{"x", {{"pageStateId", "page-nowhere"}, {"title", "Nowhere"}}}}}}
        .dump();
  });
  auto gw = quiet_gateway(provider);
  TaskDecomposition plan;
  plan.goal = kGoal;
  plan.subtasks = {make_subtask("a", 1, PageType::list)};
  CHECK(code_of([&] { summary_agent_step(plan_snapshot(plan), AgentEnv{*gw, *shipped_catalog()}); }) ==
        ErrorCode::unresolvable_reference);
  CHECK(provider->calls() == 3);
  CHECK(provider->attempts() == std::vector<int>{1, 2, 3});
}

TEST_CASE("no numbers means no dashboard") {
  TaskDecomposition plan;
  plan.goal = kGoal;
  plan.subtasks = {make_subtask("a", 1, PageType::list)};
  const auto snap = plan_snapshot(plan);
  CHECK_FALSE(has_quantifiable_data(summary_context(snap)));
  auto gw = quiet_gateway(std::make_shared<LambdaProvider>([](const CompletionRequest&) {
    return std::string(R"({"content": "Nothing booked yet."})");
  }));
  const auto summary = summary_agent_step(snap, AgentEnv{*gw, *shipped_catalog()});
  CHECK_FALSE(summary.dashboard_config.has_value());
  CHECK(summary.content == "Nothing booked yet.");
}

TEST_CASE("quantifiable context requires a dashboard") {
  auto snap = plan_snapshot(trip_plan());
  snap.history.push_back(record(2, Actor::user, ActionKind::slide, Json{{"valueKey", "budget"}, {"value", 1000}}));
  CHECK(has_quantifiable_data(summary_context(snap)));
  auto provider = std::make_shared<LambdaProvider>([](const CompletionRequest& r) {
    if (r.attempt == 1) return std::string(R"({"content": "Plain."})");
    return Json{{"content", "Budget set."},
                {"dashboardConfig", {{"items", {{{"id", "budget"}, {"label", "Budget"}, {"value", 1000}, {"type", "number"}}}}}}}
        .dump();
  });
  auto gw = quiet_gateway(provider);
  const auto summary = summary_agent_step(snap, AgentEnv{*gw, *shipped_catalog()});
  CHECK(provider->calls() == 2);
  REQUIRE(summary.dashboard_config.has_value());
  CHECK(summary.dashboard_config->items[0].value == 1000);
}

}  // TEST_SUITE
