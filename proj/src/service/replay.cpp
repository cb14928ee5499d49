#include "duet/service/replay.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "duet/context/laws.hpp"
#include "duet/schema/codec.hpp"
#include "duet/schema/duality.hpp"

namespace duet {

namespace {

[[noreturn]] void bad_trace(const std::string& what) {
  throw Error(ErrorCode::malformed_document, "trace: " + what);
}

std::string fail_if(bool bad, const std::string& message) { return bad ? message : std::string(); }

std::string stage_name(TaskStage s) { return std::string(to_string(s)); }

std::vector<std::string> summary_page_ids(const ContextSnapshot& snap) {
  std::vector<std::string> out;
  for (const auto& [id, page] : snap.ui.pages) {
    if (page.page_type == PageType::summary) out.push_back(id);
  }
  return out;
}

bool record_matches(const ActionRecord& r, const Json& args) {
  if (args.contains("kind") && to_string(r.kind) != args["kind"].get<std::string>()) return false;
  if (args.contains("actor") && to_string(r.actor) != args["actor"].get<std::string>()) return false;
  if (args.contains("payload") && !json_contains(r.payload, args["payload"])) return false;
  if (args.contains("target")) {
    if (!r.target || !json_contains(to_json(*r.target), args["target"])) return false;
  }
  return true;
}

std::string check_duality_empty(const ReplayView& v, const Json&) {
  auto report = check_duality(v.snapshot.task.plan, v.snapshot.ui);
  return fail_if(!report.empty(), "duality report: " + canonical_dump(report.to_json()));
}

std::string check_stage_is(const ReplayView& v, const Json& args) {
  const auto want = parse_task_stage(args.value("stage", ""));
  if (!want) return "stage_is needs a valid 'stage'";
  return fail_if(v.snapshot.stage != *want,
                 "stage is " + stage_name(v.snapshot.stage) + ", expected " + stage_name(*want));
}

std::string check_page_count(const ReplayView& v, const Json& args) {
  const auto& ui = v.snapshot.ui;
  std::string out;
  auto expect = [&](const char* key, std::size_t actual) {
    if (!args.contains(key)) return;
    const auto want = args[key].get<std::size_t>();
    if (want != actual && out.empty()) {
      out = std::string(key) + " is " + std::to_string(actual) + ", expected " + std::to_string(want);
    }
  };
  expect("pages", ui.pages.size());
  expect("navigation", ui.navigation.page_count());
  expect("groups", ui.navigation.page_groups.size());
  return out;
}

std::string check_history_contains(const ReplayView& v, const Json& args) {
  const bool step_only = args.value("window", "all") == "step";
  const auto& records = step_only ? v.step_records : v.snapshot.history;
  std::size_t count = 0;
  std::optional<std::int64_t> first;
  for (const auto& r : records) {
    if (!record_matches(r, args)) continue;
    ++count;
    if (!first) first = r.seq;
  }
  const auto min_count = args.value("min_count", std::size_t{1});
  if (count < min_count) {
    return "found " + std::to_string(count) + " record(s) matching " + canonical_dump(args) +
           ", expected at least " + std::to_string(min_count);
  }
  if (args.contains("followed_by")) {
    const Json& follower = args["followed_by"];
    const Json pattern = follower.is_string() ? Json{{"kind", follower}} : follower;
    for (const auto& r : v.snapshot.history) {
      if (r.seq > *first && record_matches(r, pattern)) return "";
    }
    return "no record matching " + canonical_dump(pattern) + " after seq " + std::to_string(*first);
  }
  return "";
}

std::string check_snapshot_hash(const ReplayView& v, const Json& args) {
  const auto hash = v.snapshot.hash();
  return fail_if(hash != args.value("hash", ""), "snapshot hash is " + hash);
}

std::string check_plan_order(const ReplayView& v, const Json& args) {
  if (!args.contains("order") || !args["order"].is_array()) return "plan_order needs 'order'";
  std::int64_t last = 0;
  std::string prev;
  for (const auto& id : args["order"]) {
    const Subtask* s = v.snapshot.task.plan.find(id.get<std::string>());
    if (!s) return "no subtask '" + id.get<std::string>() + "' in the plan";
    if (s->step_id <= last) {
      return "'" + s->subtask_id + "' (step " + std::to_string(s->step_id) + ") does not come after '" +
             prev + "' (step " + std::to_string(last) + ")";
    }
    last = s->step_id;
    prev = s->subtask_id;
  }
  return "";
}

std::string check_component_exists(const ReplayView& v, const Json& args) {
  const auto page = args.value("pageStateId", "");
  auto it = v.snapshot.ui.components.find(page);
  if (it == v.snapshot.ui.components.end()) return "no components for page '" + page + "'";
  for (const auto& c : it->second) {
    if (args.contains("componentId") && c.component_id != args["componentId"].get<std::string>()) continue;
    if (args.contains("kind") && c.kind() != args["kind"].get<std::string>()) continue;
    if (args.contains("config") && !json_contains(to_json(c), args["config"])) continue;
    return "";
  }
  return "no component matching " + canonical_dump(args) + " on '" + page + "'";
}

std::string check_item_present(const ReplayView& v, const Json& args) {
  const auto subtask = args.value("subtask_id", "");
  auto it = v.snapshot.task.service_data.find(subtask);
  if (it == v.snapshot.task.service_data.end()) return "no service data for '" + subtask + "'";
  for (const auto& item : it->second) {
    if (args.contains("title") && item.title != args["title"].get<std::string>()) continue;
    if (args.contains("id") && item.id != args["id"]) continue;
    if (args.contains("item") && !json_contains(to_json(item), args["item"])) continue;
    return "";
  }
  return "no item matching " + canonical_dump(args) + " for '" + subtask + "'";
}

std::string check_summary_references_live(const ReplayView& v, const Json& args) {
  const auto ids = summary_page_ids(v.snapshot);
  if (ids.empty()) return fail_if(args.value("require", true), "no summary page");
  std::vector<std::string> live;
  for (const auto& [id, _] : v.snapshot.ui.pages) live.push_back(id);
  for (const auto& id : ids) {
    const Json& detail = v.snapshot.ui.pages.at(id).state_detail;
    auto summary = validate_summary_content(detail.value("summary", Json()));
    if (!summary.ok()) return "summary on '" + id + "' is invalid: " + describe(summary.errors);
    auto issues = check_summary_references(*summary.value, live);
    if (!issues.empty()) return describe(issues);
    if (args.value("require_blocks", false) &&
        (!summary.value->navigation_blocks || summary.value->navigation_blocks->empty())) {
      return "summary on '" + id + "' has no navigation blocks";
    }
    if (args.value("require_dashboard", false) &&
        (!summary.value->dashboard_config || summary.value->dashboard_config->items.empty())) {
      return "summary on '" + id + "' has no dashboard";
    }
    if (args.contains("blocks_to")) {
      for (const auto& target : args["blocks_to"]) {
        bool found = false;
        if (summary.value->navigation_blocks) {
          for (const auto& [_, b] : *summary.value->navigation_blocks) {
            if (b.page_state_id == target.get<std::string>()) found = true;
          }
        }
        if (!found) return "summary on '" + id + "' has no block to '" + target.get<std::string>() + "'";
      }
    }
  }
  return "";
}

std::string check_no_loop_failures(const ReplayView& v, const Json&) {
  for (const auto& r : v.snapshot.history) {
    if (r.kind == ActionKind::agent_loop_failed) {
      return "loop failure at seq " + std::to_string(r.seq) + ": " + canonical_dump(r.payload);
    }
  }
  return "";
}

std::string check_interface_current(const ReplayView& v, const Json&) {
  return fail_if(v.snapshot.interface_lags(),
                 "interface built on task version " + std::to_string(v.snapshot.interface_task_version) +
                     ", current is " + std::to_string(v.snapshot.task_version));
}

std::string law_result(const std::optional<std::string>& violation) {
  return violation ? *violation : "ok";
}

}  // namespace

bool json_contains(const Json& haystack, const Json& needle) {
  if (needle.is_object()) {
    if (!haystack.is_object()) return false;
    for (auto it = needle.begin(); it != needle.end(); ++it) {
      if (!haystack.contains(it.key()) || !json_contains(haystack[it.key()], it.value())) return false;
    }
    return true;
  }
  if (needle.is_array()) {
    if (!haystack.is_array()) return false;
    for (const auto& n : needle) {
      bool found = false;
      for (const auto& h : haystack) {
        if (json_contains(h, n)) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }
  if (needle.is_number() && haystack.is_number()) return needle.get<double>() == haystack.get<double>();
  return haystack == needle;
}

const std::map<std::string, ReplayCheck>& replay_checks() {
  static const std::map<std::string, ReplayCheck> checks = {
      {"duality_empty", check_duality_empty},
      {"stage_is", check_stage_is},
      {"page_count", check_page_count},
      {"history_contains", check_history_contains},
      {"snapshot_hash", check_snapshot_hash},
      {"plan_order", check_plan_order},
      {"component_exists", check_component_exists},
      {"item_present", check_item_present},
      {"summary_references_live", check_summary_references_live},
      {"no_loop_failures", check_no_loop_failures},
      {"interface_current", check_interface_current},
  };
  return checks;
}

// ---- trace ----------------------------------------------------------------------

Trace Trace::from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("meta") || !doc["meta"].is_object()) bad_trace("missing meta");
  if (!doc.contains("steps") || !doc["steps"].is_array()) bad_trace("missing steps");
  const Json& meta = doc["meta"];
  Trace t;
  t.name = meta.value("name", "");
  t.seed = meta.value("seed", std::int64_t{0});
  t.goal = meta.value("goal", "");
  t.fixtures = meta.value("fixtures", "");
  t.catalog = meta.value("catalog", "");
  if (t.goal.empty()) bad_trace("meta.goal is required");

  for (std::size_t i = 0; i < doc["steps"].size(); ++i) {
    const Json& s = doc["steps"][i];
    const std::string where = "step " + std::to_string(i) + ": ";
    if (!s.is_object()) bad_trace(where + "not an object");
    TraceStep step;
    step.note = s.value("note", "");
    if (s.contains("expect_stage")) {
      step.expect_stage = parse_task_stage(s["expect_stage"].get<std::string>());
      if (!step.expect_stage) bad_trace(where + "unknown expect_stage");
    }
    const int ops = s.contains("action") + s.contains("advance") + s.contains("assert");
    if (ops != 1) bad_trace(where + "needs exactly one of action, advance, assert");
    if (s.contains("action")) {
      auto draft = validate_action_draft(s["action"]);
      if (!draft.ok()) bad_trace(where + describe(draft.errors));
      step.kind = TraceStep::Kind::action;
      step.action = *draft.value;
    } else if (s.contains("advance")) {
      auto stage = parse_task_stage(s["advance"].is_string() ? s["advance"].get<std::string>() : "");
      if (!stage) bad_trace(where + "unknown stage to advance to");
      step.kind = TraceStep::Kind::advance;
      step.advance = *stage;
    } else {
      step.kind = TraceStep::Kind::check;
      step.check = s["assert"].is_string() ? s["assert"].get<std::string>() : "";
      if (!replay_checks().count(step.check)) bad_trace(where + "unregistered check '" + step.check + "'");
      step.args = s.value("args", Json::object());
    }
    t.steps.push_back(std::move(step));
  }
  return t;
}

Trace Trace::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::config_error, "cannot read trace '" + file.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(parse_json(buf.str()));
}

Json StepResult::to_json() const {
  Json j{{"index", index}, {"op", op}, {"ok", ok}};
  if (!message.empty()) j["message"] = message;
  for (auto it = info.begin(); it != info.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::string ReplayReport::bytes() const { return canonical_dump(doc); }

// ---- replayer -----------------------------------------------------------------------

Replayer::Replayer(Trace trace, std::shared_ptr<CompletionProvider> provider,
                   std::shared_ptr<const Catalog> catalog, GatewayBudget budget)
    : trace_(std::move(trace)) {
  context_ = std::make_unique<ContextManager>(
      std::make_shared<ManualClock>(1'700'000'000'000 + trace_.seed * 1000, 1),
      sequential_id_generator("s-"));
  auto gateway = std::make_shared<Gateway>(std::move(provider), budget);
  OrchestratorOptions options;
  options.synchronous = true;
  orchestrator_ = std::make_unique<Orchestrator>(*context_, gateway, std::move(catalog), options);
  session_id_ = orchestrator_->create_session(trace_.goal);
  last_step_records_ = context_->history(session_id_);
}

Replayer::~Replayer() = default;

bool Replayer::step() {
  if (next_ >= trace_.steps.size()) return false;
  results_.push_back(execute(trace_.steps[next_], next_));
  ++next_;
  return true;
}

StepResult Replayer::execute(const TraceStep& step, std::size_t index) {
  StepResult result;
  result.index = index;
  result.op = step.kind == TraceStep::Kind::action    ? "action"
              : step.kind == TraceStep::Kind::advance ? "advance"
                                                      : "assert";
  if (!step.note.empty()) result.info["note"] = step.note;

  const auto before = context_->snapshot(session_id_, std::numeric_limits<std::int64_t>::max());
  if (step.expect_stage && before.stage != *step.expect_stage) {
    result.ok = false;
    result.message = "expected stage " + stage_name(*step.expect_stage) + ", session is in " +
                     stage_name(before.stage);
    return result;
  }

  if (step.kind == TraceStep::Kind::check) {
    result.info["check"] = step.check;
    const auto snap = context_->snapshot(session_id_);
    ReplayView view{snap, last_step_records_, *orchestrator_};
    result.message = replay_checks().at(step.check)(view, step.args);
    result.ok = result.message.empty();
    return result;
  }

  try {
    if (step.kind == TraceStep::Kind::action) {
      auto submitted = orchestrator_->submit_action(session_id_, step.action);
      result.info["seq"] = submitted.seq;
      result.info["classification"] = std::string(to_string(submitted.classification));
    } else {
      orchestrator_->advance_stage(session_id_, step.advance);
      result.info["advance"] = stage_name(step.advance);
    }
  } catch (const Error& e) {
    result.ok = false;
    result.message = std::string(to_string(e.code())) + ": " + e.what();
  }

  last_step_records_ = context_->history(session_id_, before.last_seq);
  for (const auto& r : last_step_records_) {
    if (r.kind == ActionKind::agent_loop_failed && result.ok) {
      result.ok = false;
      result.message = "loop failed: " + r.payload.value("error", "") + ": " +
                       r.payload.value("message", "");
    }
  }
  const auto after = context_->snapshot(session_id_, std::numeric_limits<std::int64_t>::max());
  result.info["stage"] = stage_name(after.stage);
  result.info["taskVersion"] = after.task_version;
  result.info["interfaceVersion"] = after.interface_version;
  result.info["records"] = last_step_records_.size();
  return result;
}

ReplayReport Replayer::run() {
  while (step()) {
  }
  return report();
}

ReplayReport Replayer::report() const {
  const auto snap = context_->snapshot(session_id_);
  Json steps = Json::array();
  Json failed = Json::array();
  for (const auto& r : results_) {
    steps.push_back(r.to_json());
    if (!r.ok) failed.push_back(r.index);
  }
  const auto duality = check_duality(snap.task.plan, snap.ui);
  Json invariants{{"gapless_seq", law_result(check_gapless(snap.history))},
                  {"version_monotonicity", law_result(check_version_monotonicity(snap.history))},
                  {"loop_ordering", law_result(check_loop_ordering(snap.history))},
                  {"duality_empty", duality.empty() ? "ok" : canonical_dump(duality.to_json())}};
  bool laws_hold = true;
  for (auto it = invariants.begin(); it != invariants.end(); ++it) {
    if (it.value() != "ok") laws_hold = false;
  }
  const bool complete = results_.size() == trace_.steps.size();

  ReplayReport out;
  out.passed = failed.empty() && laws_hold && complete;
  out.final_state = snap.to_json();
  out.doc = Json{{"trace", trace_.name},
                 {"seed", trace_.seed},
                 {"sessionId", session_id_},
                 {"steps", steps},
                 {"failedSteps", failed},
                 {"invariants", invariants},
                 {"final",
                  {{"stage", stage_name(snap.stage)},
                   {"taskVersion", snap.task_version},
                   {"interfaceVersion", snap.interface_version},
                   {"lastSeq", snap.last_seq},
                   {"hash", snap.hash()}}},
                 {"passed", out.passed}};
  return out;
}

ReplayReport replay_files(const std::filesystem::path& trace_file,
                          const std::filesystem::path& fixtures_dir,
                          const std::filesystem::path& catalog_dir) {
  Trace trace = Trace::load(trace_file);
  const auto base = trace_file.parent_path();
  auto fixtures = fixtures_dir;
  if (fixtures.empty()) {
    if (trace.fixtures.empty()) throw Error(ErrorCode::config_error, "no fixtures directory given");
    fixtures = base / trace.fixtures;
  }
  auto catalog = catalog_dir;
  if (catalog.empty()) catalog = base / (trace.catalog.empty() ? "../catalog" : trace.catalog);
  auto provider = ScriptedProvider::from_directory(fixtures);
  auto cat = std::make_shared<const Catalog>(Catalog::load_directory(catalog));
  Replayer replayer(std::move(trace), provider, cat);
  return replayer.run();
}

}  // namespace duet
