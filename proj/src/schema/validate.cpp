#include "duet/schema/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <regex>
#include <set>
#include <unordered_map>

#include "duet/schema/codec.hpp"
#include "duet/schema/icons.hpp"

namespace duet {

namespace {

std::string pointer(const std::string& base, std::string_view key) {
  std::string out = base;
  out.push_back('/');
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string pointer(const std::string& base, std::size_t index) {
  return base + "/" + std::to_string(index);
}

std::string_view json_kind(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return "null";
    case Json::value_t::object: return "object";
    case Json::value_t::array: return "array";
    case Json::value_t::string: return "string";
    case Json::value_t::boolean: return "boolean";
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned: return "integer";
    case Json::value_t::number_float: return "number";
    default: return "unknown";
  }
}

// Collects issues while walking a document. Accessors return nullopt when a
// field is unusable and record why.
class Reader {
 public:
  Issues errors;
  Issues warnings;

  void missing(const std::string& path) {
    errors.push_back({IssueCode::field_missing, path, "", "required field is missing"});
  }

  void mismatch(const std::string& path, std::string_view expected, const Json& got) {
    errors.push_back({IssueCode::type_mismatch, path, std::string(expected),
                      "expected " + std::string(expected) + ", got " +
                          std::string(json_kind(got))});
  }

  void violated(std::string_view name, const std::string& path, std::string message) {
    errors.push_back({IssueCode::invariant_violated, path, std::string(name), std::move(message)});
  }

  void warn(std::string_view name, const std::string& path, std::string message) {
    warnings.push_back({IssueCode::invariant_violated, path, std::string(name), std::move(message)});
  }

  bool object(const Json& j, const std::string& path) {
    if (j.is_object()) return true;
    mismatch(path, "object", j);
    return false;
  }

  // Field lookup. Absent and null are equivalent; a required field that is
  // absent records field_missing.
  const Json* field(const Json& obj, std::string_view key, const std::string& path, bool required) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
      if (required) missing(pointer(path, key));
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> str(const Json& obj, std::string_view key, const std::string& path,
                                 bool required) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      mismatch(pointer(path, key), "string", *v);
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::int64_t> integer(const Json& obj, std::string_view key,
                                      const std::string& path, bool required) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (v->is_number_integer()) return v->get<std::int64_t>();
    if (v->is_number_float()) {
      double d = v->get<double>();
      if (std::isfinite(d) && std::floor(d) == d && std::abs(d) < 9.0e15) {
        return static_cast<std::int64_t>(d);
      }
    }
    mismatch(pointer(path, key), "integer", *v);
    return std::nullopt;
  }

  std::optional<double> number(const Json& obj, std::string_view key, const std::string& path,
                               bool required) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      mismatch(pointer(path, key), "number", *v);
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<bool> boolean(const Json& obj, std::string_view key, const std::string& path,
                              bool required) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      mismatch(pointer(path, key), "boolean", *v);
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::optional<std::vector<std::string>> string_list(const Json& obj, std::string_view key,
                                                      const std::string& path, bool required) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    const auto at = pointer(path, key);
    if (!v->is_array()) {
      mismatch(at, "array", *v);
      return std::nullopt;
    }
    std::vector<std::string> out;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& e = (*v)[i];
      if (!e.is_string()) {
        mismatch(pointer(at, i), "string", e);
        ok = false;
        continue;
      }
      out.push_back(e.get<std::string>());
    }
    if (!ok) return std::nullopt;
    return out;
  }

  template <class T, class F>
  std::optional<std::vector<T>> list(const Json& obj, std::string_view key,
                                     const std::string& path, bool required, F&& read_one) {
    const Json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    const auto at = pointer(path, key);
    if (!v->is_array()) {
      mismatch(at, "array", *v);
      return std::nullopt;
    }
    std::vector<T> out;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      auto item = read_one(*this, (*v)[i], pointer(at, i));
      if (!item) {
        ok = false;
        continue;
      }
      out.push_back(std::move(*item));
    }
    if (!ok) return std::nullopt;
    return out;
  }
};

Json extras(const Json& obj, std::initializer_list<std::string_view> known) {
  Json out = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), std::string_view(it.key())) == known.end()) {
      out[it.key()] = it.value();
    }
  }
  return out;
}

bool non_empty(Reader& r, const std::optional<std::string>& value, const std::string& path) {
  if (value && value->empty()) {
    r.violated("non-empty-id", path, "identifier must not be empty");
    return false;
  }
  return true;
}

bool is_scalar(const Json& j) {
  return j.is_string() || j.is_number() || j.is_boolean();
}

bool looks_like_date(const std::string& s) {
  static const std::regex iso(R"(^\d{4}-\d{2}-\d{2}([T ].*)?$)");
  return std::regex_match(s, iso);
}

// ---- task layer --------------------------------------------------------------

std::optional<AvailableApi> read_available_api(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto name = r.str(j, "api_name", path, true);
  AvailableApi api;
  if (const Json* payload = r.field(j, "payload", path, false)) {
    if (!payload->is_object()) {
      r.mismatch(pointer(path, "payload"), "object", *payload);
      return std::nullopt;
    }
    api.payload = *payload;
  }
  if (!name) return std::nullopt;
  if (name->empty()) r.violated("non-empty-api-name", pointer(path, "api_name"), "api_name is empty");
  api.api_name = *name;
  api.extra = extras(j, {"api_name", "payload"});
  return api;
}

std::optional<Subtask> read_subtask(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  Subtask s;
  auto name = r.str(j, "subtask_name", path, true);
  auto id = r.str(j, "subtask_id", path, true);
  auto step = r.integer(j, "step_id", path, true);
  auto description = r.str(j, "description", path, false);
  auto apis = r.list<AvailableApi>(j, "matched_apis", path, true, read_available_api);
  std::vector<std::string> deps;
  if (r.field(j, "dependent_subtasks", path, false)) {
    auto d = r.string_list(j, "dependent_subtasks", path, false);
    if (!d) return std::nullopt;
    deps = std::move(*d);
  }
  auto page_type_text = r.str(j, "page_type", path, false);
  auto page_state_id = r.str(j, "page_state_id", path, false);
  if (!name || !id || !step || !apis) return std::nullopt;
  if (r.field(j, "description", path, false) && !description) return std::nullopt;

  non_empty(r, id, pointer(path, "subtask_id"));
  if (*step < 1) r.violated("positive-step-id", pointer(path, "step_id"), "step_id must be >= 1");
  if (page_type_text) {
    s.page_type = parse_page_type(*page_type_text);
    if (!s.page_type) {
      r.violated("page-type-vocabulary", pointer(path, "page_type"),
                 "unknown page_type '" + *page_type_text +
                     "' (expected list, detail, form, summary or confirmation)");
    }
  }
  if (page_state_id) non_empty(r, page_state_id, pointer(path, "page_state_id"));
  if (page_type_text.has_value() != page_state_id.has_value()) {
    r.violated("page-type-pairs-with-page-state-id", path,
               "page_type and page_state_id must be given together");
  }

  s.subtask_name = *name;
  s.subtask_id = *id;
  s.step_id = *step;
  s.description = description;
  s.matched_apis = std::move(*apis);
  s.dependent_subtasks = std::move(deps);
  s.page_state_id = page_state_id;
  s.extra = extras(j, {"subtask_name", "subtask_id", "step_id", "description", "matched_apis",
                       "dependent_subtasks", "page_type", "page_state_id"});
  return s;
}

void check_plan_invariants(Reader& r, const TaskDecomposition& td, const std::string& path) {
  const auto subtasks_path = pointer(path, "subtasks");
  for (std::size_t i = 0; i < td.subtasks.size(); ++i) {
    if (td.subtasks[i].step_id != static_cast<std::int64_t>(i + 1)) {
      r.violated("contiguous-step-ids", pointer(pointer(subtasks_path, i), "step_id"),
                 "step_id " + std::to_string(td.subtasks[i].step_id) + " at position " +
                     std::to_string(i) + ", expected " + std::to_string(i + 1));
      break;
    }
  }

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < td.subtasks.size(); ++i) {
    if (!index.emplace(td.subtasks[i].subtask_id, i).second) {
      r.violated("unique-subtask-ids", pointer(pointer(subtasks_path, i), "subtask_id"),
                 "duplicate subtask_id '" + td.subtasks[i].subtask_id + "'");
    }
  }

  std::set<std::string> page_ids;
  for (std::size_t i = 0; i < td.subtasks.size(); ++i) {
    const auto& s = td.subtasks[i];
    if (s.page_state_id && !page_ids.insert(*s.page_state_id).second) {
      r.violated("unique-page-state-ids", pointer(pointer(subtasks_path, i), "page_state_id"),
                 "duplicate page_state_id '" + *s.page_state_id + "'");
    }
  }

  bool deps_ok = true;
  for (std::size_t i = 0; i < td.subtasks.size(); ++i) {
    const auto& deps = td.subtasks[i].dependent_subtasks;
    for (std::size_t k = 0; k < deps.size(); ++k) {
      if (!index.count(deps[k])) {
        deps_ok = false;
        r.violated("dependency-exists",
                   pointer(pointer(pointer(subtasks_path, i), "dependent_subtasks"), k),
                   "unknown subtask id '" + deps[k] + "'");
      }
    }
  }
  if (!deps_ok) return;

  // Three-colour DFS over the dependency graph.
  std::vector<int> colour(td.subtasks.size(), 0);
  bool cyclic = false;
  std::function<void(std::size_t)> visit = [&](std::size_t u) {
    colour[u] = 1;
    for (const auto& dep : td.subtasks[u].dependent_subtasks) {
      auto v = index.at(dep);
      if (colour[v] == 1) {
        cyclic = true;
      } else if (colour[v] == 0) {
        visit(v);
      }
      if (cyclic) return;
    }
    colour[u] = 2;
  };
  for (std::size_t u = 0; u < td.subtasks.size() && !cyclic; ++u) {
    if (colour[u] == 0) visit(u);
  }
  if (cyclic) r.violated("acyclic-dependencies", subtasks_path, "dependency cycle detected");
}

std::optional<TaskDecomposition> read_task_decomposition(Reader& r, const Json& j,
                                                         const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto goal = r.str(j, "goal", path, true);
  auto subtasks = r.list<Subtask>(j, "subtasks", path, true, read_subtask);
  if (!goal || !subtasks) return std::nullopt;
  TaskDecomposition td;
  td.goal = *goal;
  td.subtasks = std::move(*subtasks);
  td.extra = extras(j, {"goal", "subtasks"});
  check_plan_invariants(r, td, path);
  return td;
}

// ---- data layer -----------------------------------------------------------------

std::optional<PriceDetail> read_price_detail(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto label = r.str(j, "label", path, true);
  auto amount = r.number(j, "amount", path, true);
  if (!label || !amount) return std::nullopt;
  if (label->empty()) r.violated("non-empty-key", pointer(path, "label"), "label is empty");
  if (!std::isfinite(*amount) || *amount < 0.0) {
    r.violated("non-negative-price", pointer(path, "amount"), "amount must be finite and >= 0");
  }
  return PriceDetail{*label, *amount, extras(j, {"label", "amount"})};
}

std::optional<AttributeDetail> read_attribute_detail(Reader& r, const Json& j,
                                                     const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto key = r.str(j, "key", path, true);
  const Json* value = r.field(j, "value", path, true);
  if (!key || !value) return std::nullopt;
  if (!value->is_string() && !value->is_number()) {
    r.mismatch(pointer(path, "value"), "string|number", *value);
    return std::nullopt;
  }
  if (key->empty()) r.violated("non-empty-key", pointer(path, "key"), "key is empty");
  return AttributeDetail{*key, *value, extras(j, {"key", "value"})};
}

std::optional<BasicItem> read_basic_item(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  BasicItem item;
  const Json* id = r.field(j, "id", path, true);
  auto title = r.str(j, "title", path, true);
  auto description = r.str(j, "description", path, false);
  auto image_query = r.str(j, "image_query", path, false);
  std::vector<std::string> tags;
  if (r.field(j, "tags", path, false)) {
    auto t = r.string_list(j, "tags", path, false);
    if (!t) return std::nullopt;
    tags = std::move(*t);
  }
  std::vector<AttributeDetail> attrs;
  if (r.field(j, "extended_attributes", path, false)) {
    auto a = r.list<AttributeDetail>(j, "extended_attributes", path, false, read_attribute_detail);
    if (!a) return std::nullopt;
    attrs = std::move(*a);
  }
  if (!id || !title) return std::nullopt;
  if (!id->is_string() && !id->is_number_integer()) {
    r.mismatch(pointer(path, "id"), "string|integer", *id);
    return std::nullopt;
  }
  if (id->is_string() && id->get<std::string>().empty()) {
    r.violated("non-empty-id", pointer(path, "id"), "identifier must not be empty");
  }
  if (const Json* price = r.field(j, "price", path, false)) {
    const auto at = pointer(path, "price");
    if (price->is_number()) {
      double v = price->get<double>();
      if (!std::isfinite(v) || v < 0.0) {
        r.violated("non-negative-price", at, "price must be finite and >= 0");
      }
      item.price = v;
    } else if (price->is_array()) {
      std::vector<PriceDetail> parts;
      for (std::size_t i = 0; i < price->size(); ++i) {
        auto p = read_price_detail(r, (*price)[i], pointer(at, i));
        if (!p) return std::nullopt;
        parts.push_back(std::move(*p));
      }
      item.price = std::move(parts);
    } else {
      r.mismatch(at, "number|PriceDetail[]", *price);
      return std::nullopt;
    }
  }
  if ((r.field(j, "description", path, false) && !description) ||
      (r.field(j, "image_query", path, false) && !image_query)) {
    return std::nullopt;
  }
  item.id = *id;
  item.title = *title;
  item.description = description;
  item.tags = std::move(tags);
  item.extended_attributes = std::move(attrs);
  item.image_query = image_query;
  item.extra = extras(j, {"id", "title", "description", "tags", "price", "extended_attributes",
                          "image_query"});
  return item;
}

std::optional<std::vector<BasicItem>> read_basic_item_list(Reader& r, const Json& j,
                                                           const std::string& path) {
  if (!j.is_array()) {
    r.mismatch(path, "array", j);
    return std::nullopt;
  }
  std::vector<BasicItem> items;
  bool ok = true;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto item = read_basic_item(r, j[i], pointer(path, i));
    if (!item) {
      ok = false;
      continue;
    }
    items.push_back(std::move(*item));
  }
  if (!ok) return std::nullopt;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!seen.insert(items[i].id.dump()).second) {
      r.violated("unique-item-ids", pointer(pointer(path, i), "id"),
                 "duplicate item id " + items[i].id.dump());
    }
  }
  return items;
}

// ---- navigation and pages -------------------------------------------------------

std::optional<NavigationPage> read_navigation_page(Reader& r, const Json& j,
                                                   const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto name = r.str(j, "pagename", path, true);
  auto id = r.str(j, "pageStateId", path, true);
  if (!name || !id) return std::nullopt;
  non_empty(r, id, pointer(path, "pageStateId"));
  return NavigationPage{*name, *id, extras(j, {"pagename", "pageStateId"})};
}

std::optional<PageGroup> read_page_group(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto name = r.str(j, "groupname", path, true);
  auto icon = r.str(j, "groupicon", path, true);
  auto pages = r.list<NavigationPage>(j, "pages", path, true, read_navigation_page);
  if (!name || !icon || !pages) return std::nullopt;
  PageGroup g{*name, *icon, std::move(*pages), extras(j, {"groupname", "groupicon", "pages"})};
  if (!is_known_icon(g.groupicon)) {
    r.warn("icon-vocabulary", pointer(path, "groupicon"),
           "icon '" + g.groupicon + "' is not in the vocabulary; using 'default'");
    g.groupicon = std::string(kDefaultIcon);
  }
  if (g.pages.size() > kMaxPagesPerGroup) {
    r.violated("max-5-pages-per-group", pointer(path, "pages"),
               "group has " + std::to_string(g.pages.size()) + " pages, at most 5 allowed");
  }
  return g;
}

std::optional<Navigation> read_navigation(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto groups = r.list<PageGroup>(j, "pageGroups", path, true, read_page_group);
  auto initial = r.integer(j, "initialGroupIndex", path, false);
  if (!groups) return std::nullopt;
  if (r.field(j, "initialGroupIndex", path, false) && !initial) return std::nullopt;
  Navigation nav;
  nav.page_groups = std::move(*groups);
  nav.initial_group_index = initial.value_or(0);
  nav.extra = extras(j, {"pageGroups", "initialGroupIndex"});
  if (nav.page_groups.size() > kMaxPageGroups) {
    r.violated("max-3-groups", pointer(path, "pageGroups"),
               "navigation has " + std::to_string(nav.page_groups.size()) +
                   " groups, a maximum of 3 is allowed");
  }
  // An empty navigation keeps the default index 0.
  const bool index_ok =
      nav.page_groups.empty()
          ? nav.initial_group_index == 0
          : nav.initial_group_index >= 0 &&
                nav.initial_group_index < static_cast<std::int64_t>(nav.page_groups.size());
  if (!index_ok) {
    r.violated("initial-group-index-in-range", pointer(path, "initialGroupIndex"),
               "initialGroupIndex " + std::to_string(nav.initial_group_index) +
                   " does not name a group");
  }
  std::set<std::string> ids;
  for (std::size_t g = 0; g < nav.page_groups.size(); ++g) {
    for (std::size_t p = 0; p < nav.page_groups[g].pages.size(); ++p) {
      const auto& id = nav.page_groups[g].pages[p].page_state_id;
      if (!ids.insert(id).second) {
        r.violated("unique-page-state-ids",
                   pointer(pointer(pointer(pointer(path, "pageGroups"), g), "pages"), p),
                   "duplicate pageStateId '" + id + "'");
      }
    }
  }
  return nav;
}

std::optional<PageState> read_page_state(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto session = r.str(j, "sessionId", path, true);
  auto id = r.str(j, "pageStateId", path, true);
  auto type = r.str(j, "pageType", path, true);
  auto updated = r.integer(j, "lastUpdated", path, false);
  PageState ps;
  if (const Json* detail = r.field(j, "stateDetail", path, false)) {
    if (!detail->is_object()) {
      r.mismatch(pointer(path, "stateDetail"), "object", *detail);
      return std::nullopt;
    }
    ps.state_detail = *detail;
  }
  if (!session || !id || !type) return std::nullopt;
  if (r.field(j, "lastUpdated", path, false) && !updated) return std::nullopt;
  non_empty(r, id, pointer(path, "pageStateId"));
  auto page_type = parse_page_type(*type);
  if (!page_type) {
    r.violated("page-type-vocabulary", pointer(path, "pageType"),
               "unknown pageType '" + *type + "'");
    return std::nullopt;
  }
  ps.session_id = *session;
  ps.page_state_id = *id;
  ps.page_type = *page_type;
  ps.last_updated = updated;
  ps.extra = extras(j, {"sessionId", "pageStateId", "pageType", "stateDetail", "lastUpdated"});
  return ps;
}

// ---- components ---------------------------------------------------------------------

std::optional<DashboardItem> read_dashboard_item(Reader& r, const Json& j,
                                                 const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto id = r.str(j, "id", path, true);
  auto label = r.str(j, "label", path, true);
  const Json* value = r.field(j, "value", path, true);
  auto type_text = r.str(j, "type", path, true);
  auto unit = r.str(j, "unit", path, false);
  if (!id || !label || !value || !type_text) return std::nullopt;
  if (r.field(j, "unit", path, false) && !unit) return std::nullopt;
  DashboardItem item;
  if (*type_text == "number") {
    item.type = DashboardValueType::number;
  } else if (*type_text == "string") {
    item.type = DashboardValueType::string;
  } else if (*type_text == "date") {
    item.type = DashboardValueType::date;
  } else {
    r.violated("dashboard-type-vocabulary", pointer(path, "type"),
               "type must be number, string or date");
    return std::nullopt;
  }
  const bool kind_ok = (item.type == DashboardValueType::number && value->is_number()) ||
                       (item.type == DashboardValueType::string && value->is_string()) ||
                       (item.type == DashboardValueType::date && value->is_string() &&
                        looks_like_date(value->get<std::string>()));
  if (!kind_ok) {
    r.violated("value-matches-type", pointer(path, "value"),
               "value of kind " + std::string(json_kind(*value)) + " does not match type '" +
                   *type_text + "'");
  }
  item.id = *id;
  item.label = *label;
  item.value = *value;
  item.unit = unit;
  if (const Json* edit = r.field(j, "editOptions", path, false)) item.edit_options = *edit;
  item.extra = extras(j, {"id", "label", "value", "type", "unit", "editOptions"});
  return item;
}

std::optional<DashboardConfig> read_dashboard_items(Reader& r, const Json& j,
                                                    const std::string& path) {
  auto items = r.list<DashboardItem>(j, "items", path, true, read_dashboard_item);
  if (!items) return std::nullopt;
  if (items->empty()) {
    r.violated("dashboard-non-empty", pointer(path, "items"), "dashboard has no items");
  }
  return DashboardConfig{std::move(*items)};
}

std::optional<SelectionOption> read_selection_option(Reader& r, const Json& j,
                                                     const std::string& path) {
  if (j.is_string()) return SelectionOption{j.get<std::string>(), j};
  if (!j.is_object()) {
    r.mismatch(path, "string|object", j);
    return std::nullopt;
  }
  auto label = r.str(j, "label", path, true);
  if (!label) return std::nullopt;
  SelectionOption option{*label, Json(*label)};
  if (const Json* value = r.field(j, "value", path, false)) {
    if (!is_scalar(*value)) {
      r.mismatch(pointer(path, "value"), "scalar", *value);
      return std::nullopt;
    }
    option.value = *value;
  }
  return option;
}

std::optional<Component> read_component(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto id = r.str(j, "componentId", path, true);
  auto kind = r.str(j, "kind", path, true);
  if (!id || !kind) return std::nullopt;
  non_empty(r, id, pointer(path, "componentId"));

  Component c;
  c.component_id = *id;
  auto finish = [&](ComponentConfig config,
                    std::initializer_list<std::string_view> known) -> std::optional<Component> {
    c.config = std::move(config);
    Json extra = extras(j, known);
    extra.erase("componentId");
    extra.erase("kind");
    c.extra = std::move(extra);
    return c;
  };

  if (*kind == "cardView") {
    auto page = r.str(j, "pageStateId", path, true);
    auto key = r.str(j, "itemDataKey", path, true);
    auto attrs = r.string_list(j, "displayedAttributes", path, true);
    auto fav = r.boolean(j, "enableFavorites", path, false);
    auto sort = r.boolean(j, "isSortEnabled", path, false);
    if (!page || !key || !attrs) return std::nullopt;
    if ((r.field(j, "enableFavorites", path, false) && !fav) ||
        (r.field(j, "isSortEnabled", path, false) && !sort)) {
      return std::nullopt;
    }
    if (attrs->size() < 3 || attrs->size() > 5) {
      r.violated("cardview-3-to-5-attributes", pointer(path, "displayedAttributes"),
                 "displayedAttributes has " + std::to_string(attrs->size()) +
                     " entries, expected 3 to 5");
    }
    std::set<std::string> unique(attrs->begin(), attrs->end());
    if (unique.size() != attrs->size()) {
      r.violated("cardview-unique-attributes", pointer(path, "displayedAttributes"),
                 "displayedAttributes contains duplicates");
    }
    return finish(CardViewConfig{*page, *key, std::move(*attrs), fav.value_or(false),
                                 sort.value_or(false)},
                  {"pageStateId", "itemDataKey", "displayedAttributes", "enableFavorites",
                   "isSortEnabled"});
  }
  if (*kind == "price") {
    const Json* value = r.field(j, "value", path, true);
    auto prefix = r.str(j, "prefix", path, false);
    if (!value) return std::nullopt;
    if (!value->is_number() && !value->is_string()) {
      r.mismatch(pointer(path, "value"), "number|string", *value);
      return std::nullopt;
    }
    if (r.field(j, "prefix", path, false) && !prefix) return std::nullopt;
    return finish(PriceComponentConfig{*value, prefix.value_or("USD")}, {"value", "prefix"});
  }
  if (*kind == "title") {
    auto value = r.str(j, "value", path, true);
    auto level = r.integer(j, "level", path, false);
    if (!value) return std::nullopt;
    if (r.field(j, "level", path, false) && !level) return std::nullopt;
    const auto lv = level.value_or(3);
    if (lv < 1 || lv > 6) {
      r.violated("title-level-range", pointer(path, "level"), "level must be within 1..6");
    }
    return finish(TitleComponentConfig{*value, lv}, {"value", "level"});
  }
  if (*kind == "inputField") {
    auto label = r.str(j, "label", path, true);
    auto placeholder = r.str(j, "placeholder", path, false);
    auto key = r.str(j, "valueKey", path, true);
    if (!label || !key) return std::nullopt;
    if (r.field(j, "placeholder", path, false) && !placeholder) return std::nullopt;
    return finish(InputFieldConfig{*label, placeholder.value_or(""), *key},
                  {"label", "placeholder", "valueKey"});
  }
  if (*kind == "selection") {
    auto label = r.str(j, "label", path, true);
    auto options = r.list<SelectionOption>(j, "options", path, true, read_selection_option);
    auto key = r.str(j, "valueKey", path, true);
    if (!label || !options || !key) return std::nullopt;
    if (options->empty()) {
      r.violated("selection-has-options", pointer(path, "options"), "selection has no options");
    }
    return finish(SelectionConfig{*label, std::move(*options), *key},
                  {"label", "options", "valueKey"});
  }
  if (*kind == "actionButton") {
    auto label = r.str(j, "label", path, true);
    auto action = r.str(j, "actionId", path, true);
    if (!label || !action) return std::nullopt;
    return finish(ActionButtonConfig{*label, *action}, {"label", "actionId"});
  }
  if (*kind == "slider") {
    auto label = r.str(j, "label", path, true);
    auto lo = r.number(j, "min", path, true);
    auto hi = r.number(j, "max", path, true);
    auto step = r.number(j, "step", path, true);
    auto key = r.str(j, "valueKey", path, true);
    auto unit = r.str(j, "unit", path, false);
    if (!label || !lo || !hi || !step || !key) return std::nullopt;
    if (r.field(j, "unit", path, false) && !unit) return std::nullopt;
    if (!(*lo < *hi)) r.violated("slider-range", path, "min must be below max");
    if (!(*step > 0.0)) r.violated("slider-step-positive", pointer(path, "step"), "step must be > 0");
    return finish(SliderConfig{*label, *lo, *hi, *step, *key, unit.value_or("")},
                  {"label", "min", "max", "step", "valueKey", "unit"});
  }
  if (*kind == "datePicker") {
    auto label = r.str(j, "label", path, true);
    auto key = r.str(j, "valueKey", path, true);
    if (!label || !key) return std::nullopt;
    return finish(DatePickerConfig{*label, *key}, {"label", "valueKey"});
  }
  if (*kind == "dashboard") {
    auto dashboard = read_dashboard_items(r, j, path);
    if (!dashboard) return std::nullopt;
    return finish(std::move(*dashboard), {"items"});
  }
  if (*kind == "navigationCard") {
    auto page = r.str(j, "pageStateId", path, true);
    auto title = r.str(j, "title", path, true);
    auto summary = r.str(j, "summary", path, false);
    if (!page || !title) return std::nullopt;
    if (r.field(j, "summary", path, false) && !summary) return std::nullopt;
    return finish(NavigationCardConfig{*page, *title, summary.value_or("")},
                  {"pageStateId", "title", "summary"});
  }
  r.violated("component-kind-vocabulary", pointer(path, "kind"), "unknown component kind '" + *kind + "'");
  return std::nullopt;
}

std::optional<CardViewConfig> read_card_view_config(Reader& r, const Json& j,
                                                   const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  Json envelope = j;
  envelope["kind"] = "cardView";
  if (!envelope.contains("componentId")) envelope["componentId"] = "cardview";
  auto c = read_component(r, envelope, path);
  if (!c) return std::nullopt;
  return std::get<CardViewConfig>(c->config);
}

// ---- summary ---------------------------------------------------------------------------

std::optional<ViewNavigationBlockConfig> read_nav_block(Reader& r, const Json& j,
                                                        const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto page = r.str(j, "pageStateId", path, true);
  auto title = r.str(j, "title", path, true);
  if (!page || !title) return std::nullopt;
  return ViewNavigationBlockConfig{*page, *title, extras(j, {"pageStateId", "title"})};
}

std::optional<SummaryContent> read_summary_content(Reader& r, const Json& j,
                                                   const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto content = r.str(j, "content", path, true);
  SummaryContent s;
  if (const Json* dash = r.field(j, "dashboardConfig", path, false)) {
    const auto at = pointer(path, "dashboardConfig");
    if (!r.object(*dash, at)) return std::nullopt;
    auto d = read_dashboard_items(r, *dash, at);
    if (!d) return std::nullopt;
    s.dashboard_config = std::move(*d);
  }
  if (const Json* blocks = r.field(j, "navigationBlocks", path, false)) {
    const auto at = pointer(path, "navigationBlocks");
    if (!r.object(*blocks, at)) return std::nullopt;
    std::map<std::string, ViewNavigationBlockConfig> out;
    for (auto it = blocks->begin(); it != blocks->end(); ++it) {
      auto b = read_nav_block(r, it.value(), pointer(at, it.key()));
      if (!b) return std::nullopt;
      out.emplace(it.key(), std::move(*b));
    }
    s.navigation_blocks = std::move(out);
  }
  if (!content) return std::nullopt;
  s.content = *content;
  s.extra = extras(j, {"dashboardConfig", "content", "navigationBlocks"});
  for (const auto& id : nav_block_placeholders(s.content)) {
    if (!s.navigation_blocks || !s.navigation_blocks->count(id)) {
      r.violated("placeholder-resolves", pointer(path, "content"),
                 "placeholder {{nav-block:" + id + "}} has no navigationBlocks entry");
    }
  }
  return s;
}

// ---- actions ------------------------------------------------------------------------------

std::optional<ActionTarget> read_action_target(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto page = r.str(j, "pageStateId", path, true);
  auto component = r.str(j, "componentId", path, false);
  auto key = r.str(j, "valueKey", path, false);
  if (!page) return std::nullopt;
  if ((r.field(j, "componentId", path, false) && !component) ||
      (r.field(j, "valueKey", path, false) && !key)) {
    return std::nullopt;
  }
  return ActionTarget{*page, component, key};
}

std::optional<ActionDraft> read_action_draft(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto actor_text = r.str(j, "actor", path, false);
  auto kind_text = r.str(j, "kind", path, true);
  ActionDraft d;
  if (const Json* target = r.field(j, "target", path, false)) {
    auto t = read_action_target(r, *target, pointer(path, "target"));
    if (!t) return std::nullopt;
    d.target = std::move(*t);
  }
  if (const Json* payload = r.field(j, "payload", path, false)) {
    if (!payload->is_object()) {
      r.mismatch(pointer(path, "payload"), "object", *payload);
      return std::nullopt;
    }
    d.payload = *payload;
  }
  if (!kind_text) return std::nullopt;
  if (r.field(j, "actor", path, false) && !actor_text) return std::nullopt;
  auto kind = parse_action_kind(*kind_text);
  if (!kind) {
    r.violated("action-kind-vocabulary", pointer(path, "kind"), "unknown kind '" + *kind_text + "'");
    return std::nullopt;
  }
  d.kind = *kind;
  d.actor = is_user_kind(d.kind) ? Actor::user : Actor::agent;
  if (actor_text) {
    auto actor = parse_actor(*actor_text);
    if (!actor) {
      r.violated("actor-vocabulary", pointer(path, "actor"), "actor must be user or agent");
      return std::nullopt;
    }
    d.actor = *actor;
  }
  const bool agent_kind = !is_user_kind(d.kind) && d.kind != ActionKind::stage_change;
  if ((d.actor == Actor::agent && is_user_kind(d.kind)) ||
      (d.actor == Actor::user && agent_kind)) {
    r.violated("actor-matches-kind", path,
               std::string(to_string(d.kind)) + " cannot be performed by " +
                   std::string(to_string(d.actor)));
  }
  return d;
}

std::optional<ActionRecord> read_action_record(Reader& r, const Json& j, const std::string& path) {
  auto draft = read_action_draft(r, j, path);
  if (!j.is_object()) return std::nullopt;
  auto seq = r.integer(j, "seq", path, true);
  auto at = r.integer(j, "at", path, true);
  if (!draft || !seq || !at) return std::nullopt;
  if (*seq < 1) r.violated("positive-seq", pointer(path, "seq"), "seq must be >= 1");
  return ActionRecord{*seq, draft->actor, draft->kind, draft->target, draft->payload, *at};
}

// ---- raw service output ----------------------------------------------------------------------

std::optional<Json> read_service_records(Reader& r, const Json& j, const std::string& path) {
  auto all_objects = [](const Json& arr) {
    return std::all_of(arr.begin(), arr.end(), [](const Json& e) { return e.is_object(); });
  };
  if (j.is_array()) {
    if (!all_objects(j)) {
      r.violated("records-are-objects", path, "every record must be an object");
      return std::nullopt;
    }
    return j;
  }
  if (j.is_object()) {
    // Mock services often wrap the records: {"results": [...]}.
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_array() && !it->empty() && all_objects(*it)) return *it;
    }
    return Json::array({j});
  }
  r.mismatch(path, "array|object", j);
  return std::nullopt;
}

template <class T, class F>
Validated<T> run(const Json& doc, F&& read) {
  Reader r;
  auto value = read(r, doc, std::string());
  Validated<T> out;
  out.errors = std::move(r.errors);
  out.warnings = std::move(r.warnings);
  if (value && out.errors.empty()) out.value = std::move(*value);
  return out;
}

}  // namespace

// ---- public API ---------------------------------------------------------------------------------

std::string_view to_string(IssueCode code) noexcept {
  switch (code) {
    case IssueCode::unknown_schema: return "UnknownSchema";
    case IssueCode::field_missing: return "FieldMissing";
    case IssueCode::type_mismatch: return "TypeMismatch";
    case IssueCode::invariant_violated: return "InvariantViolated";
  }
  return "InvariantViolated";
}

Json Issue::to_json() const {
  Json j{{"code", std::string(to_string(code))}, {"path", path}, {"message", message}};
  if (!name.empty()) j["name"] = name;
  return j;
}

Json to_json(const Issues& issues) {
  Json arr = Json::array();
  for (const auto& i : issues) arr.push_back(i.to_json());
  return arr;
}

std::string describe(const Issues& issues) {
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(i.code));
    if (!i.name.empty()) out += "(" + i.name + ")";
    out += " at " + (i.path.empty() ? std::string("/") : i.path) + ": " + i.message;
  }
  return out;
}

namespace {

constexpr std::pair<SchemaId, std::string_view> kSchemaNames[] = {
    {SchemaId::task_decomposition, "TaskDecomposition"},
    {SchemaId::subtask, "Subtask"},
    {SchemaId::available_api, "AvailableAPI"},
    {SchemaId::basic_item, "BasicItem"},
    {SchemaId::basic_item_list, "BasicItemList"},
    {SchemaId::price_detail, "PriceDetail"},
    {SchemaId::attribute_detail, "AttributeDetail"},
    {SchemaId::navigation, "Navigation"},
    {SchemaId::page_group, "PageGroup"},
    {SchemaId::navigation_page, "NavigationPage"},
    {SchemaId::page_state, "PageState"},
    {SchemaId::component, "ComponentConfig"},
    {SchemaId::card_view_config, "CardViewConfig"},
    {SchemaId::summary_content, "SummaryContent"},
    {SchemaId::dashboard_item, "DashboardItem"},
    {SchemaId::dashboard_config, "DashboardConfig"},
    {SchemaId::action_draft, "ActionDraft"},
    {SchemaId::action_record, "ActionRecord"},
    {SchemaId::service_records, "ServiceRecords"},
};

}  // namespace

std::string_view to_string(SchemaId id) noexcept {
  for (const auto& [k, name] : kSchemaNames) {
    if (k == id) return name;
  }
  return "Unknown";
}

std::optional<SchemaId> parse_schema_id(std::string_view name) noexcept {
  for (const auto& [k, n] : kSchemaNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

const std::vector<SchemaId>& all_schema_ids() {
  static const std::vector<SchemaId> ids = [] {
    std::vector<SchemaId> out;
    for (const auto& [k, _] : kSchemaNames) out.push_back(k);
    return out;
  }();
  return ids;
}

Validated<TaskDecomposition> validate_task_decomposition(const Json& doc) {
  return run<TaskDecomposition>(doc, read_task_decomposition);
}
Validated<Subtask> validate_subtask(const Json& doc) { return run<Subtask>(doc, read_subtask); }
Validated<AvailableApi> validate_available_api(const Json& doc) {
  return run<AvailableApi>(doc, read_available_api);
}
Validated<BasicItem> validate_basic_item(const Json& doc) {
  return run<BasicItem>(doc, read_basic_item);
}
Validated<std::vector<BasicItem>> validate_basic_item_list(const Json& doc) {
  return run<std::vector<BasicItem>>(doc, read_basic_item_list);
}
Validated<PriceDetail> validate_price_detail(const Json& doc) {
  return run<PriceDetail>(doc, read_price_detail);
}
Validated<AttributeDetail> validate_attribute_detail(const Json& doc) {
  return run<AttributeDetail>(doc, read_attribute_detail);
}
Validated<Navigation> validate_navigation(const Json& doc) {
  return run<Navigation>(doc, read_navigation);
}
Validated<PageGroup> validate_page_group(const Json& doc) {
  return run<PageGroup>(doc, read_page_group);
}
Validated<NavigationPage> validate_navigation_page(const Json& doc) {
  return run<NavigationPage>(doc, read_navigation_page);
}
Validated<PageState> validate_page_state(const Json& doc) {
  return run<PageState>(doc, read_page_state);
}
Validated<Component> validate_component(const Json& doc) {
  return run<Component>(doc, read_component);
}
Validated<CardViewConfig> validate_card_view_config(const Json& doc) {
  return run<CardViewConfig>(doc, read_card_view_config);
}
Validated<SummaryContent> validate_summary_content(const Json& doc) {
  return run<SummaryContent>(doc, read_summary_content);
}
Validated<DashboardItem> validate_dashboard_item(const Json& doc) {
  return run<DashboardItem>(doc, read_dashboard_item);
}
Validated<DashboardConfig> validate_dashboard_config(const Json& doc) {
  return run<DashboardConfig>(doc, [](Reader& r, const Json& j, const std::string& path) {
    return r.object(j, path) ? read_dashboard_items(r, j, path) : std::nullopt;
  });
}
Validated<ActionDraft> validate_action_draft(const Json& doc) {
  return run<ActionDraft>(doc, read_action_draft);
}
Validated<ActionRecord> validate_action_record(const Json& doc) {
  return run<ActionRecord>(doc, read_action_record);
}

namespace {

template <class T>
ValidationReport to_report(SchemaId id, Validated<T> v) {
  ValidationReport report;
  report.schema = id;
  report.errors = std::move(v.errors);
  report.warnings = std::move(v.warnings);
  if (v.value) {
    if constexpr (std::is_same_v<T, Json>) {
      report.normalized = std::move(*v.value);
    } else {
      report.normalized = to_json(*v.value);
    }
  }
  return report;
}

}  // namespace

Json ValidationReport::to_json() const {
  Json j{{"schema", std::string(to_string(schema))},
         {"ok", ok()},
         {"errors", duet::to_json(errors)},
         {"warnings", duet::to_json(warnings)}};
  return j;
}

ValidationReport validate(SchemaId schema, const Json& doc) {
  switch (schema) {
    case SchemaId::task_decomposition: return to_report(schema, validate_task_decomposition(doc));
    case SchemaId::subtask: return to_report(schema, validate_subtask(doc));
    case SchemaId::available_api: return to_report(schema, validate_available_api(doc));
    case SchemaId::basic_item: return to_report(schema, validate_basic_item(doc));
    case SchemaId::basic_item_list: return to_report(schema, validate_basic_item_list(doc));
    case SchemaId::price_detail: return to_report(schema, validate_price_detail(doc));
    case SchemaId::attribute_detail: return to_report(schema, validate_attribute_detail(doc));
    case SchemaId::navigation: return to_report(schema, validate_navigation(doc));
    case SchemaId::page_group: return to_report(schema, validate_page_group(doc));
    case SchemaId::navigation_page: return to_report(schema, validate_navigation_page(doc));
    case SchemaId::page_state: return to_report(schema, validate_page_state(doc));
    case SchemaId::component: return to_report(schema, validate_component(doc));
    case SchemaId::card_view_config: return to_report(schema, validate_card_view_config(doc));
    case SchemaId::summary_content: return to_report(schema, validate_summary_content(doc));
    case SchemaId::dashboard_item: return to_report(schema, validate_dashboard_item(doc));
    case SchemaId::dashboard_config: return to_report(schema, validate_dashboard_config(doc));
    case SchemaId::action_draft: return to_report(schema, validate_action_draft(doc));
    case SchemaId::action_record: return to_report(schema, validate_action_record(doc));
    case SchemaId::service_records:
      return to_report(schema, run<Json>(doc, read_service_records));
  }
  return {};
}

ValidationReport validate(std::string_view schema_name, const Json& doc) {
  if (auto id = parse_schema_id(schema_name)) return validate(*id, doc);
  ValidationReport report;
  report.errors.push_back({IssueCode::unknown_schema, "", std::string(schema_name),
                           "schema '" + std::string(schema_name) + "' is not registered"});
  return report;
}

Validated<Json> validate_service_records(const Json& doc) {
  return run<Json>(doc, read_service_records);
}

Issues check_cardview_against_model(const CardViewConfig& config, const Json& item_model) {
  Issues issues;
  for (std::size_t i = 0; i < config.displayed_attributes.size(); ++i) {
    const auto& key = config.displayed_attributes[i];
    // id and title exist on every BasicItem.
    if (key == "id" || key == "title") continue;
    if (!item_model.is_object() || !item_model.contains(key)) {
      issues.push_back({IssueCode::invariant_violated, "/displayedAttributes/" + std::to_string(i),
                        "cardview-attribute-in-model",
                        "attribute '" + key + "' is not part of the item data model"});
    }
  }
  return issues;
}

Issues check_summary_references(const SummaryContent& summary,
                                const std::vector<std::string>& live_page_state_ids) {
  Issues issues;
  const std::set<std::string> live(live_page_state_ids.begin(), live_page_state_ids.end());
  if (summary.navigation_blocks) {
    for (const auto& [block, config] : *summary.navigation_blocks) {
      if (!live.count(config.page_state_id)) {
        issues.push_back({IssueCode::invariant_violated,
                          "/navigationBlocks/" + block + "/pageStateId", "zero-hallucination",
                          "navigation block '" + block + "' references unknown pageStateId '" +
                              config.page_state_id + "'"});
      }
    }
  }
  for (const auto& id : nav_block_placeholders(summary.content)) {
    if (!summary.navigation_blocks || !summary.navigation_blocks->count(id)) {
      issues.push_back({IssueCode::invariant_violated, "/content", "placeholder-resolves",
                        "placeholder {{nav-block:" + id + "}} has no navigationBlocks entry"});
    }
  }
  return issues;
}

Issues validate_interface(const InterfaceDescription& ui) {
  Issues issues;
  for (const auto& [id, page] : ui.pages) {
    if (page.page_state_id != id) {
      issues.push_back({IssueCode::invariant_violated, "/pageStates/" + id, "page-key-matches-id",
                        "page stored under '" + id + "' has pageStateId '" + page.page_state_id +
                            "'"});
    }
  }
  for (const auto& [page_id, list] : ui.components) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!seen.insert(list[i].component_id).second) {
        issues.push_back({IssueCode::invariant_violated,
                          "/components/" + page_id + "/" + std::to_string(i),
                          "unique-component-ids",
                          "duplicate componentId '" + list[i].component_id + "'"});
      }
    }
  }
  return issues;
}

}  // namespace duet
