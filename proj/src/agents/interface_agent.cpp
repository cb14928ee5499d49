#include "duet/agents/interface_agent.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

#include "duet/agents/summary_agent.hpp"
#include "duet/context/hash.hpp"
#include "duet/schema/codec.hpp"
#include "duet/schema/duality.hpp"
#include "duet/schema/icons.hpp"

namespace duet {

namespace {

std::vector<const Subtask*> navigable_subtasks(const TaskDecomposition& plan) {
  std::vector<const Subtask*> out;
  for (const Subtask* s : page_subtasks(plan)) {
    if (is_navigable(*s->page_type)) out.push_back(s);
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  char prev = 0;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (!std::isalnum(uc)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      if (std::isupper(uc) && std::islower(static_cast<unsigned char>(prev)) && !cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
      cur.push_back(static_cast<char>(std::tolower(uc)));
    }
    prev = c;
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// ---- navigation ----

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::string group_name(const std::vector<const Subtask*>& members) {
  if (members.size() == 1) return members.front()->subtask_name;
  bool contiguous = true;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i]->step_id != members[i - 1]->step_id + 1) contiguous = false;
  }
  if (contiguous) {
    return "Steps " + std::to_string(members.front()->step_id) + "-" +
           std::to_string(members.back()->step_id);
  }
  return members.front()->subtask_name;
}

Navigation make_navigation(const std::vector<std::vector<const Subtask*>>& groups) {
  Navigation nav;
  for (const auto& members : groups) {
    PageGroup g;
    g.groupname = group_name(members);
    g.groupicon = group_icon_for(members);
    for (const Subtask* s : members) g.pages.push_back({s->subtask_name, *s->page_state_id, {}});
    nav.page_groups.push_back(std::move(g));
  }
  return nav;
}

Navigation model_navigation(const TaskDecomposition& plan, const AgentEnv& env, bool& fallback) {
  Bindings b{{"task_decomposition_json", canonical_dump(to_json(plan))}};
  GatewayHooks hooks;
  hooks.prepare = [&](Json& doc) {
    if (!doc.is_object() || !doc.contains("pageGroups") || !doc["pageGroups"].is_array()) return;
    for (auto& g : doc["pageGroups"]) {
      if (!g.is_object() || !g.contains("pages") || !g["pages"].is_array()) continue;
      for (auto& p : g["pages"]) {
        if (!p.is_object() || !p.contains("pageStateId") || !p["pageStateId"].is_string()) continue;
        for (const auto& s : plan.subtasks) {
          if (s.page_state_id == p["pageStateId"].get<std::string>()) p["pagename"] = s.subtask_name;
        }
      }
    }
  };
  hooks.check = [&](const Json& doc) { return check_navigation_bijection(doc, plan); };
  try {
    auto result = env.gateway.complete_validated(TemplateId::navigation_gen, b, hooks);
    return std::move(*validate_navigation(result.value).value);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::exhausted_attempts) throw;
    fallback = true;
    return heuristic_navigation(plan);
  }
}

// ---- pages ----

const char* component_kind_for_field(std::string_view kind) {
  if (kind == "input" || kind == "text") return "inputField";
  if (kind == "selection" || kind == "select") return "selection";
  if (kind == "slider") return "slider";
  if (kind == "date" || kind == "datePicker") return "datePicker";
  return nullptr;
}

std::string page_digest(const Subtask& s, const std::vector<BasicItem>* items) {
  Json src{{"subtask", to_json(s)}, {"items", items ? to_json(*items) : Json::array()}};
  return canonical_hash(src).substr(0, 16);
}

Json model_page_detail(const Subtask& s, const std::vector<BasicItem>* items,
                       const std::string& session_id, const AgentEnv& env, bool& fallback) {
  Bindings b{{"subtask_json", canonical_dump(to_json(s))},
             {"api_data_json", canonical_dump(items ? to_json(*items) : Json::array())}};
  GatewayHooks hooks;
  hooks.prepare = [&](Json& doc) {
    if (!doc.is_object()) return;
    doc["pageStateId"] = *s.page_state_id;
    doc["pageType"] = std::string(to_string(*s.page_type));
    doc["sessionId"] = session_id;
    if (!doc.contains("stateDetail") || doc["stateDetail"].is_null()) doc["stateDetail"] = Json::object();
  };
  hooks.check = [](const Json& doc) {
    return check_state_detail(doc.value("stateDetail", Json::object()), "/stateDetail");
  };
  try {
    auto result = env.gateway.complete_validated(TemplateId::page_state_gen, b, hooks);
    return result.value.value("stateDetail", Json::object());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::exhausted_attempts) throw;
    fallback = true;
    return Json{{"title", s.subtask_name}, {"description", s.description.value_or("")}};
  }
}

void set_or_erase(Json& obj, const char* key, Json value) {
  if (value.empty()) {
    obj.erase(key);
  } else {
    obj[key] = std::move(value);
  }
}

Component make(std::string id, ComponentConfig config) {
  return Component{std::move(id), std::move(config), Json::object()};
}

std::optional<double> confirmed_total(const std::vector<Json>& refs,
                                      const std::vector<BasicItem>* items) {
  if (!items) return std::nullopt;
  std::optional<double> total;
  for (const auto& ref : refs) {
    const BasicItem* item = find_item(*items, ref);
    if (item && item->price) total = total.value_or(0.0) + price_total(*item->price);
  }
  return total;
}

struct PageInputs {
  const Subtask* subtask;
  const std::vector<BasicItem>* items;
  bool reused;
};

}  // namespace

// ---- navigation ---------------------------------------------------------------

std::string group_icon_for(const std::vector<const Subtask*>& members) {
  static const std::pair<std::string_view, std::string_view> kKeywords[] = {
      {"flight", "flight"},   {"airplane", "flight"}, {"train", "train"},
      {"rail", "train"},      {"car", "car"},         {"hotel", "hotel"},
      {"accommodation", "hotel"}, {"stay", "hotel"},  {"lodging", "hotel"},
      {"restaurant", "food"}, {"dining", "food"},     {"food", "food"},
      {"attraction", "camera"}, {"sight", "camera"},  {"itinerary", "calendar"},
      {"schedule", "calendar"}, {"date", "calendar"}, {"budget", "wallet"},
      {"price", "wallet"},    {"preference", "user"}, {"profile", "user"},
      {"overview", "list"},   {"plan", "list"},       {"book", "ticket"},
      {"map", "map"},         {"search", "search"},   {"summary", "info"},
  };
  for (const Subtask* s : members) {
    std::vector<std::string> words = split_words(s->subtask_name);
    for (const auto& call : s->matched_apis) {
      auto api_words = split_words(call.api_name);
      words.insert(words.end(), api_words.begin(), api_words.end());
    }
    for (const auto& [keyword, icon] : kKeywords) {
      for (const auto& w : words) {
        if (starts_with(w, keyword)) return std::string(icon);
      }
    }
  }
  return "list";
}

Navigation heuristic_navigation(const TaskDecomposition& plan) {
  const auto nav_subtasks = navigable_subtasks(plan);
  if (nav_subtasks.size() > kMaxNavigablePages) {
    throw Error(ErrorCode::capacity_exceeded,
                std::to_string(nav_subtasks.size()) + " navigable subtasks exceed the limit of " +
                    std::to_string(kMaxNavigablePages));
  }
  if (nav_subtasks.empty()) return Navigation{};

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < plan.subtasks.size(); ++i) index[plan.subtasks[i].subtask_id] = i;
  UnionFind uf(plan.subtasks.size());
  for (std::size_t i = 0; i < plan.subtasks.size(); ++i) {
    for (const auto& dep : plan.subtasks[i].dependent_subtasks) {
      auto it = index.find(dep);
      if (it != index.end()) uf.unite(i, it->second);
    }
  }

  std::vector<std::size_t> roots;
  std::map<std::size_t, std::vector<const Subtask*>> components;
  for (const Subtask* s : nav_subtasks) {
    const auto root = uf.find(index[s->subtask_id]);
    if (!components.count(root)) roots.push_back(root);
    components[root].push_back(s);
  }

  std::vector<std::vector<const Subtask*>> groups;
  for (auto root : roots) {
    const auto& members = components[root];
    for (std::size_t i = 0; i < members.size(); i += kMaxPagesPerGroup) {
      const auto end = std::min(members.size(), i + kMaxPagesPerGroup);
      groups.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(i),
                          members.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }

  while (groups.size() > kMaxPageGroups) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
      const auto size = groups[i].size() + groups[i + 1].size();
      if (size > kMaxPagesPerGroup) continue;
      if (!best || size < groups[*best].size() + groups[*best + 1].size()) best = i;
    }
    if (!best) break;
    auto& into = groups[*best];
    into.insert(into.end(), groups[*best + 1].begin(), groups[*best + 1].end());
    std::stable_sort(into.begin(), into.end(),
                     [](const Subtask* a, const Subtask* b) { return a->step_id < b->step_id; });
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(*best) + 1);
  }

  if (groups.size() > kMaxPageGroups) {
    groups.clear();
    for (std::size_t i = 0; i < nav_subtasks.size(); i += kMaxPagesPerGroup) {
      const auto end = std::min(nav_subtasks.size(), i + kMaxPagesPerGroup);
      groups.emplace_back(nav_subtasks.begin() + static_cast<std::ptrdiff_t>(i),
                          nav_subtasks.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  return make_navigation(groups);
}

Issues check_navigation_bijection(const Json& navigation, const TaskDecomposition& plan) {
  Issues out;
  if (!navigation.is_object() || !navigation.contains("pageGroups") ||
      !navigation["pageGroups"].is_array()) {
    return out;  // the schema reports the shape
  }
  std::set<std::string> seen;
  const Json& groups = navigation["pageGroups"];
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string gpath = "/pageGroups/" + std::to_string(g);
    const Json& pages = groups[g].is_object() ? groups[g].value("pages", Json::array()) : Json::array();
    if (pages.is_array() && pages.empty()) {
      out.push_back({IssueCode::invariant_violated, gpath + "/pages", "non-empty-group",
                     "a group needs at least one page"});
    }
    if (!pages.is_array()) continue;
    for (std::size_t p = 0; p < pages.size(); ++p) {
      const std::string path = gpath + "/pages/" + std::to_string(p) + "/pageStateId";
      if (!pages[p].is_object() || !pages[p].contains("pageStateId") ||
          !pages[p]["pageStateId"].is_string()) {
        continue;
      }
      const auto id = pages[p]["pageStateId"].get<std::string>();
      const Subtask* owner = nullptr;
      for (const auto& s : plan.subtasks) {
        if (s.page_state_id == id) owner = &s;
      }
      if (!owner || !owner->page_type) {
        out.push_back({IssueCode::invariant_violated, path, "nav-no-orphans",
                       "'" + id + "' is not the page of any subtask"});
      } else if (!is_navigable(*owner->page_type)) {
        out.push_back({IssueCode::invariant_violated, path, "nav-excludes-summary",
                       "'" + id + "' is a " + std::string(to_string(*owner->page_type)) +
                           " page and must stay out of the navigation"});
      }
      if (!seen.insert(id).second) {
        out.push_back({IssueCode::invariant_violated, path, "nav-unique-pages",
                       "'" + id + "' is listed twice"});
      }
    }
  }
  for (const Subtask* s : navigable_subtasks(plan)) {
    if (!seen.count(*s->page_state_id)) {
      out.push_back({IssueCode::invariant_violated, "/pageGroups", "nav-covers-subtasks",
                     "subtask '" + s->subtask_id + "' needs a page for '" + *s->page_state_id + "'"});
    }
  }
  return out;
}

// ---- pages and components ---------------------------------------------------------

Json field_component(const Json& field) {
  if (!field.is_object() || !field.contains("kind") || !field["kind"].is_string()) return nullptr;
  const char* kind = component_kind_for_field(field["kind"].get<std::string>());
  if (!kind || !field.contains("valueKey") || !field["valueKey"].is_string()) return nullptr;
  Json c{{"componentId", "field:" + field["valueKey"].get<std::string>()}, {"kind", kind}};
  for (const char* key : {"label", "placeholder", "options", "min", "max", "step", "unit", "valueKey"}) {
    if (field.contains(key)) c[key] = field[key];
  }
  if (!c.contains("label")) c["label"] = field["valueKey"];
  return c;
}

Issues check_state_detail(const Json& detail, const std::string& base_path) {
  Issues out;
  if (!detail.is_object()) return out;
  if (detail.contains("fields")) {
    const Json& fields = detail["fields"];
    if (!fields.is_array()) {
      out.push_back({IssueCode::type_mismatch, base_path + "/fields", "array", "fields must be an array"});
    } else {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string path = base_path + "/fields/" + std::to_string(i);
        Json c = field_component(fields[i]);
        if (c.is_null()) {
          out.push_back({IssueCode::invariant_violated, path, "field-shape",
                         "a field needs kind (input, selection, slider, date) and valueKey"});
          continue;
        }
        for (auto issue : validate_component(c).errors) {
          issue.path = path + issue.path;
          out.push_back(std::move(issue));
        }
      }
    }
  }
  if (detail.contains("actions")) {
    const Json& actions = detail["actions"];
    if (!actions.is_array()) {
      out.push_back({IssueCode::type_mismatch, base_path + "/actions", "array", "actions must be an array"});
    } else {
      for (std::size_t i = 0; i < actions.size(); ++i) {
        const Json& a = actions[i];
        if (!a.is_object() || !a.contains("actionId") || !a["actionId"].is_string() ||
            !a.contains("label") || !a["label"].is_string()) {
          out.push_back({IssueCode::invariant_violated, base_path + "/actions/" + std::to_string(i),
                         "action-shape", "an action needs string actionId and label"});
        }
      }
    }
  }
  return out;
}

// ---- CardView ----------------------------------------------------------------------

Json item_model(const std::vector<BasicItem>& items, const ApiDefinition* api) {
  Json model = Json::object();
  auto describe_field = [&](const std::string& key, const Json& sample) {
    if (model.contains(key)) return;
    if (api && api->data_model.contains(key) && api->data_model[key].is_string()) {
      model[key] = api->data_model[key];
    } else {
      model[key] = std::string(sample.type_name());
    }
  };
  for (const auto& item : items) {
    describe_field("id", item.id);
    describe_field("title", item.title);
    if (item.description) describe_field("description", *item.description);
    if (!item.tags.empty()) describe_field("tags", Json::array());
    if (item.price) describe_field("price", price_total(*item.price));
    if (item.image_query) describe_field("image_query", *item.image_query);
    for (const auto& a : item.extended_attributes) describe_field(a.key, a.value);
  }
  return model;
}

std::vector<std::string> model_tokens(const Json& model) {
  std::vector<std::string> out;
  if (!model.is_object()) return out;
  for (auto it = model.begin(); it != model.end(); ++it) {
    auto words = split_words(it.key());
    out.insert(out.end(), words.begin(), words.end());
  }
  return out;
}

bool favorites_rule(const Json& model) {
  for (const auto& t : model_tokens(model)) {
    if (starts_with(t, "book") || starts_with(t, "sav") || starts_with(t, "product")) return true;
  }
  return false;
}

bool sort_rule(const Json& model) {
  static const std::set<std::string> kSortable = {"price", "prices", "rating", "ratings", "date", "dates"};
  for (const auto& t : model_tokens(model)) {
    if (kSortable.count(t)) return true;
  }
  return false;
}

CardViewConfig fallback_cardview(const Subtask& subtask, const Json& model) {
  std::vector<std::string> attrs{"title"};
  std::vector<std::string> rest;
  for (auto it = model.begin(); it != model.end(); ++it) {
    const auto& k = it.key();
    if (k != "id" && k != "title" && k != "image_query") rest.push_back(k);
  }
  static const std::vector<std::string> kFirst = {"price", "rating", "date"};
  std::stable_sort(rest.begin(), rest.end(), [](const std::string& a, const std::string& b) {
    auto rank = [](const std::string& k) {
      auto it = std::find(kFirst.begin(), kFirst.end(), k);
      return it == kFirst.end() ? kFirst.size() : static_cast<std::size_t>(it - kFirst.begin());
    };
    return rank(a) < rank(b);
  });
  for (const auto& k : rest) {
    if (attrs.size() == 5) break;
    attrs.push_back(k);
  }
  for (const char* pad : {"id", "description", "tags", "price"}) {
    if (attrs.size() >= 3) break;
    if (std::find(attrs.begin(), attrs.end(), pad) == attrs.end()) attrs.push_back(pad);
  }
  CardViewConfig c;
  c.page_state_id = subtask.page_state_id.value_or("");
  c.item_data_key = "items";
  c.displayed_attributes = std::move(attrs);
  return c;
}

CardViewConfig cardview_config_for(const Subtask& subtask, const Json& model, const Json& sample,
                                   const Gateway& gateway) {
  Bindings b{{"subtask_name", subtask.subtask_name},
             {"data_model_schema_json", canonical_dump(model)},
             {"sample_data_record_json", canonical_dump(sample)}};
  GatewayHooks hooks;
  hooks.prepare = [&](Json& doc) {
    if (!doc.is_object()) return;
    doc["pageStateId"] = subtask.page_state_id.value_or("");
    doc["itemDataKey"] = "items";
  };
  hooks.check = [&](const Json& doc) {
    auto parsed = validate_card_view_config(doc);
    if (!parsed.ok()) return parsed.errors;
    return check_cardview_against_model(*parsed.value, model);
  };
  CardViewConfig config;
  try {
    auto result = gateway.complete_validated(TemplateId::cardview_gen, b, hooks);
    config = std::move(*validate_card_view_config(result.value).value);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::exhausted_attempts) throw;
    config = fallback_cardview(subtask, model);
  }
  config.enable_favorites = favorites_rule(model);
  config.is_sort_enabled = sort_rule(model);
  return config;
}

// ---- the step ------------------------------------------------------------------------

InterfaceProposal interface_agent_step(const ContextSnapshot& snapshot, const AgentEnv& env) {
  const TaskDecomposition& plan = snapshot.task.plan;
  const auto nav_subtasks = navigable_subtasks(plan);
  if (nav_subtasks.size() > kMaxNavigablePages) {
    throw Error(ErrorCode::capacity_exceeded,
                std::to_string(nav_subtasks.size()) + " navigable subtasks exceed the limit of " +
                    std::to_string(kMaxNavigablePages),
                Json{{"navigable", nav_subtasks.size()}, {"max", kMaxNavigablePages}});
  }

  InterfaceProposal out;
  InterfaceDescription& ui = out.ui;
  if (!nav_subtasks.empty()) ui.navigation = model_navigation(plan, env, out.navigation_fallback);

  const auto pages = page_subtasks(plan);
  const auto live = live_pages(snapshot);
  std::vector<PageInputs> inputs;

  for (const Subtask* s : pages) {
    const std::string& id = *s->page_state_id;
    const auto data = snapshot.task.service_data.find(s->subtask_id);
    const auto* items = data == snapshot.task.service_data.end() ? nullptr : &data->second;
    const auto prev = snapshot.ui.pages.find(id);

    PageState page;
    page.session_id = snapshot.session_id;
    page.page_state_id = id;
    page.page_type = *s->page_type;
    bool reused = false;

    if (*s->page_type == PageType::summary) {
      SummaryContent summary = summary_agent_step(snapshot, env, live);
      page.state_detail = Json{{"title", s->subtask_name}, {"summary", to_json(summary)}};
    } else {
      const std::string digest = page_digest(*s, items);
      page.extra["sourceDigest"] = digest;
      if (prev != snapshot.ui.pages.end() && prev->second.page_type == *s->page_type &&
          prev->second.extra.value("sourceDigest", "") == digest) {
        page.state_detail = prev->second.state_detail;
        reused = true;
        out.reused_pages.push_back(id);
      } else {
        bool fallback = false;
        page.state_detail = model_page_detail(*s, items, snapshot.session_id, env, fallback);
        if (fallback) out.fallback_pages.push_back(id);
      }
      Json& d = page.state_detail;
      if (!d.is_object()) d = Json::object();
      set_or_erase(d, "items", items ? to_json(*items) : Json::array());
      Json values = Json::object();
      for (const auto& [k, v] : latest_user_values(snapshot.history, id)) values[k] = v;
      set_or_erase(d, "values", values);
      set_or_erase(d, "favorites", Json(favorited_items(snapshot.history, id)));
      set_or_erase(d, "confirmed", Json(confirmed_items(snapshot.history, id)));
    }
    if (!page.state_detail.contains("title") || !page.state_detail["title"].is_string()) {
      page.state_detail["title"] = s->subtask_name;
    }
    ui.pages[id] = std::move(page);
    inputs.push_back({s, items, reused});
  }

  // Summary and confirmation pages are reached through a card on the
  // closest earlier navigable page.
  std::map<std::string, std::vector<const Subtask*>> hosted;
  {
    const Subtask* last_navigable = nullptr;
    std::vector<const Subtask*> waiting;
    for (const Subtask* s : pages) {
      if (is_navigable(*s->page_type)) {
        last_navigable = s;
      } else if (last_navigable) {
        hosted[*last_navigable->page_state_id].push_back(s);
      } else {
        waiting.push_back(s);
      }
    }
    if (!nav_subtasks.empty()) {
      auto& first = hosted[*nav_subtasks.front()->page_state_id];
      first.insert(first.begin(), waiting.begin(), waiting.end());
    }
  }

  for (const auto& in : inputs) {
    const Subtask& s = *in.subtask;
    const std::string& id = *s.page_state_id;
    const Json& d = ui.pages[id].state_detail;
    std::vector<Component> list;
    std::set<std::string> used;
    auto push = [&](Component c) {
      if (used.insert(c.component_id).second) list.push_back(std::move(c));
    };

    push(make("title", TitleComponentConfig{d["title"].get<std::string>(), 2}));

    if (d.contains("fields") && d["fields"].is_array()) {
      for (const auto& f : d["fields"]) {
        auto parsed = validate_component(field_component(f));
        if (parsed.ok()) push(std::move(*parsed.value));
      }
    }

    if (in.items && !in.items->empty()) {
      std::optional<CardViewConfig> config;
      if (in.reused) {
        if (const Component* old = snapshot.ui.find_component(id, "cards:items")) {
          if (const auto* c = std::get_if<CardViewConfig>(&old->config)) config = *c;
        }
      }
      if (!config) {
        const ApiDefinition* api = nullptr;
        for (const auto& call : s.matched_apis) {
          const auto* def = env.catalog.find_api(call.api_name);
          if (def && def->fetches_data) {
            api = def;
            break;
          }
        }
        const Json model = item_model(*in.items, api);
        config = cardview_config_for(s, model, to_json(in.items->front()), env.gateway);
      }
      push(make("cards:items", *config));
    }

    const auto confirmed = confirmed_items(snapshot.history, id);
    const std::string currency = d.value("currency", std::string("USD"));
    if (auto total = confirmed_total(confirmed, in.items)) {
      push(make("price", PriceComponentConfig{*total, currency}));
    } else if (d.contains("price") && d["price"].is_number()) {
      push(make("price", PriceComponentConfig{d["price"], currency}));
    }

    if (d.contains("actions") && d["actions"].is_array()) {
      for (const auto& a : d["actions"]) {
        if (!a.is_object() || !a.contains("actionId") || !a["actionId"].is_string() ||
            !a.contains("label") || !a["label"].is_string()) {
          continue;
        }
        const auto action_id = a["actionId"].get<std::string>();
        push(make("action:" + action_id, ActionButtonConfig{a["label"].get<std::string>(), action_id}));
      }
    }

    if (*s.page_type == PageType::summary && d.contains("summary")) {
      auto summary = validate_summary_content(d["summary"]);
      if (summary.ok()) {
        if (summary.value->dashboard_config && !summary.value->dashboard_config->items.empty()) {
          push(make("dashboard", *summary.value->dashboard_config));
        }
        if (summary.value->navigation_blocks) {
          for (const auto& [block, cfg] : *summary.value->navigation_blocks) {
            push(make("navblock:" + block, NavigationCardConfig{cfg.page_state_id, cfg.title, ""}));
          }
        }
      }
    }

    if (d.value("planOverview", false)) {
      for (const Subtask* other : pages) {
        if (other == in.subtask) continue;
        push(make("plan:" + *other->page_state_id,
                  NavigationCardConfig{*other->page_state_id, other->subtask_name,
                                       other->description.value_or("")}));
      }
    }

    auto host = hosted.find(id);
    if (host != hosted.end()) {
      for (const Subtask* target : host->second) {
        push(make("navcard:" + *target->page_state_id,
                  NavigationCardConfig{*target->page_state_id, target->subtask_name,
                                       target->description.value_or("")}));
      }
    }
    ui.components[id] = std::move(list);
  }

  // Nothing the model produced leaves this function unvetted.
  Issues issues;
  auto nav_check = validate_navigation(to_json(ui.navigation));
  issues.insert(issues.end(), nav_check.errors.begin(), nav_check.errors.end());
  for (const auto& [id, page] : ui.pages) {
    for (auto issue : validate_page_state(to_json(page)).errors) {
      issue.path = "/pageStates/" + id + issue.path;
      issues.push_back(std::move(issue));
    }
  }
  for (const auto& [id, list] : ui.components) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (auto issue : validate_component(to_json(list[i])).errors) {
        issue.path = "/components/" + id + "/" + std::to_string(i) + issue.path;
        issues.push_back(std::move(issue));
      }
    }
  }
  auto ui_issues = validate_interface(ui);
  issues.insert(issues.end(), ui_issues.begin(), ui_issues.end());
  if (!issues.empty()) {
    throw Error(ErrorCode::validation_failed, "generated interface is invalid: " + describe(issues),
                Json{{"issues", to_json(issues)}});
  }
  DualityReport report = check_duality(plan, ui);
  if (!report.empty()) {
    throw Error(ErrorCode::duality_violated, "generated interface breaks duality",
                Json{{"report", report.to_json()}});
  }
  return out;
}

}  // namespace duet
