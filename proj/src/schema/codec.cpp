#include "duet/schema/codec.hpp"

namespace duet {

namespace {

// Extra fields never shadow the typed ones.
void merge_extra(Json& out, const Json& extra) {
  if (!extra.is_object()) return;
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!out.contains(it.key())) out[it.key()] = it.value();
  }
}

Json string_array(const std::vector<std::string>& values) {
  Json arr = Json::array();
  for (const auto& v : values) arr.push_back(v);
  return arr;
}

template <class T>
Json array_of(const std::vector<T>& values) {
  Json arr = Json::array();
  for (const auto& v : values) arr.push_back(to_json(v));
  return arr;
}

[[noreturn]] void throw_malformed(SchemaId schema, const Issues& errors) {
  throw Error(ErrorCode::malformed_document,
              std::string(to_string(schema)) + ": " + describe(errors),
              Json{{"schema", std::string(to_string(schema))}, {"issues", to_json(errors)}});
}

template <class T>
T unwrap(SchemaId schema, Validated<T> v) {
  if (!v.ok()) throw_malformed(schema, v.errors);
  return std::move(*v.value);
}

}  // namespace

Json to_json(const AvailableApi& v) {
  Json j{{"api_name", v.api_name}, {"payload", v.payload}};
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const Subtask& v) {
  Json j{{"subtask_name", v.subtask_name},
         {"subtask_id", v.subtask_id},
         {"step_id", v.step_id},
         {"matched_apis", array_of(v.matched_apis)},
         {"dependent_subtasks", string_array(v.dependent_subtasks)}};
  if (v.description) j["description"] = *v.description;
  if (v.page_type) j["page_type"] = std::string(to_string(*v.page_type));
  if (v.page_state_id) j["page_state_id"] = *v.page_state_id;
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const TaskDecomposition& v) {
  Json j{{"goal", v.goal}, {"subtasks", array_of(v.subtasks)}};
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const PriceDetail& v) {
  Json j{{"label", v.label}, {"amount", v.amount}};
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const AttributeDetail& v) {
  Json j{{"key", v.key}, {"value", v.value}};
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const BasicItem& v) {
  Json j{{"id", v.id},
         {"title", v.title},
         {"tags", string_array(v.tags)},
         {"extended_attributes", array_of(v.extended_attributes)}};
  if (v.description) j["description"] = *v.description;
  if (v.image_query) j["image_query"] = *v.image_query;
  if (v.price) {
    if (const auto* scalar = std::get_if<double>(&*v.price)) {
      j["price"] = *scalar;
    } else {
      j["price"] = array_of(std::get<std::vector<PriceDetail>>(*v.price));
    }
  }
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const std::vector<BasicItem>& v) { return array_of(v); }

Json to_json(const NavigationPage& v) {
  Json j{{"pagename", v.pagename}, {"pageStateId", v.page_state_id}};
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const PageGroup& v) {
  Json j{{"groupname", v.groupname}, {"groupicon", v.groupicon}, {"pages", array_of(v.pages)}};
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const Navigation& v) {
  Json j{{"pageGroups", array_of(v.page_groups)}, {"initialGroupIndex", v.initial_group_index}};
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const PageState& v) {
  Json j{{"sessionId", v.session_id},
         {"pageStateId", v.page_state_id},
         {"pageType", std::string(to_string(v.page_type))},
         {"stateDetail", v.state_detail}};
  if (v.last_updated) j["lastUpdated"] = *v.last_updated;
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const DashboardItem& v) {
  Json j{{"id", v.id},
         {"label", v.label},
         {"value", v.value},
         {"type", std::string(to_string(v.type))}};
  if (v.unit) j["unit"] = *v.unit;
  if (v.edit_options) j["editOptions"] = *v.edit_options;
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const DashboardConfig& v) { return Json{{"items", array_of(v.items)}}; }

namespace {

struct ConfigWriter {
  Json& j;

  void operator()(const CardViewConfig& c) const {
    j["pageStateId"] = c.page_state_id;
    j["itemDataKey"] = c.item_data_key;
    j["displayedAttributes"] = string_array(c.displayed_attributes);
    j["enableFavorites"] = c.enable_favorites;
    j["isSortEnabled"] = c.is_sort_enabled;
  }
  void operator()(const PriceComponentConfig& c) const {
    j["value"] = c.value;
    j["prefix"] = c.prefix;
  }
  void operator()(const TitleComponentConfig& c) const {
    j["value"] = c.value;
    j["level"] = c.level;
  }
  void operator()(const InputFieldConfig& c) const {
    j["label"] = c.label;
    j["placeholder"] = c.placeholder;
    j["valueKey"] = c.value_key;
  }
  void operator()(const SelectionConfig& c) const {
    Json options = Json::array();
    for (const auto& o : c.options) options.push_back(Json{{"label", o.label}, {"value", o.value}});
    j["label"] = c.label;
    j["options"] = std::move(options);
    j["valueKey"] = c.value_key;
  }
  void operator()(const ActionButtonConfig& c) const {
    j["label"] = c.label;
    j["actionId"] = c.action_id;
  }
  void operator()(const SliderConfig& c) const {
    j["label"] = c.label;
    j["min"] = c.min;
    j["max"] = c.max;
    j["step"] = c.step;
    j["valueKey"] = c.value_key;
    if (!c.unit.empty()) j["unit"] = c.unit;
  }
  void operator()(const DatePickerConfig& c) const {
    j["label"] = c.label;
    j["valueKey"] = c.value_key;
  }
  void operator()(const DashboardConfig& c) const { j["items"] = array_of(c.items); }
  void operator()(const NavigationCardConfig& c) const {
    j["pageStateId"] = c.page_state_id;
    j["title"] = c.title;
    if (!c.summary.empty()) j["summary"] = c.summary;
  }
};

}  // namespace

Json to_json(const Component& v) {
  Json j{{"componentId", v.component_id}, {"kind", std::string(v.kind())}};
  std::visit(ConfigWriter{j}, v.config);
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const CardViewConfig& v) {
  Json j = Json::object();
  ConfigWriter{j}(v);
  return j;
}

Json to_json(const ViewNavigationBlockConfig& v) {
  Json j{{"pageStateId", v.page_state_id}, {"title", v.title}};
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const SummaryContent& v) {
  Json j{{"content", v.content}};
  if (v.dashboard_config) j["dashboardConfig"] = to_json(*v.dashboard_config);
  if (v.navigation_blocks) {
    Json blocks = Json::object();
    for (const auto& [id, block] : *v.navigation_blocks) blocks[id] = to_json(block);
    j["navigationBlocks"] = std::move(blocks);
  }
  merge_extra(j, v.extra);
  return j;
}

Json to_json(const PageStateMap& v) {
  Json j = Json::object();
  for (const auto& [id, page] : v) j[id] = to_json(page);
  return j;
}

Json to_json(const ComponentMap& v) {
  Json j = Json::object();
  for (const auto& [id, list] : v) j[id] = array_of(list);
  return j;
}

Json to_json(const ActionTarget& v) {
  Json j{{"pageStateId", v.page_state_id}};
  if (v.component_id) j["componentId"] = *v.component_id;
  if (v.value_key) j["valueKey"] = *v.value_key;
  return j;
}

Json to_json(const ActionDraft& v) {
  Json j{{"actor", std::string(to_string(v.actor))},
         {"kind", std::string(to_string(v.kind))},
         {"payload", v.payload}};
  if (v.target) j["target"] = to_json(*v.target);
  return j;
}

Json to_json(const ActionRecord& v) {
  Json j{{"seq", v.seq},
         {"actor", std::string(to_string(v.actor))},
         {"kind", std::string(to_string(v.kind))},
         {"payload", v.payload},
         {"at", v.at}};
  if (v.target) j["target"] = to_json(*v.target);
  return j;
}

std::string canonical_dump(const Json& value) {
  // nlohmann objects are std::map backed, so keys already come out sorted.
  try {
    return value.dump(-1, ' ', false, Json::error_handler_t::strict);
  } catch (const Json::type_error& e) {
    throw Error(ErrorCode::malformed_document, std::string("cannot serialize: ") + e.what());
  }
}

Json parse_json(std::string_view bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::malformed_document, e.what(),
                Json{{"issues", Json::array({Json{{"code", "Syntax"},
                                                  {"path", ""},
                                                  {"message", e.what()},
                                                  {"byte", e.byte}}})}});
  }
}

template <>
TaskDecomposition parse<TaskDecomposition>(std::string_view bytes) {
  return unwrap(SchemaId::task_decomposition, validate_task_decomposition(parse_json(bytes)));
}

template <>
Subtask parse<Subtask>(std::string_view bytes) {
  return unwrap(SchemaId::subtask, validate_subtask(parse_json(bytes)));
}

template <>
BasicItem parse<BasicItem>(std::string_view bytes) {
  return unwrap(SchemaId::basic_item, validate_basic_item(parse_json(bytes)));
}

template <>
std::vector<BasicItem> parse<std::vector<BasicItem>>(std::string_view bytes) {
  return unwrap(SchemaId::basic_item_list, validate_basic_item_list(parse_json(bytes)));
}

template <>
Navigation parse<Navigation>(std::string_view bytes) {
  return unwrap(SchemaId::navigation, validate_navigation(parse_json(bytes)));
}

template <>
PageState parse<PageState>(std::string_view bytes) {
  return unwrap(SchemaId::page_state, validate_page_state(parse_json(bytes)));
}

template <>
Component parse<Component>(std::string_view bytes) {
  return unwrap(SchemaId::component, validate_component(parse_json(bytes)));
}

template <>
SummaryContent parse<SummaryContent>(std::string_view bytes) {
  return unwrap(SchemaId::summary_content, validate_summary_content(parse_json(bytes)));
}

template <>
ActionRecord parse<ActionRecord>(std::string_view bytes) {
  return unwrap(SchemaId::action_record, validate_action_record(parse_json(bytes)));
}

Json parse(std::string_view bytes, SchemaId schema) {
  auto report = validate(schema, parse_json(bytes));
  if (!report.ok()) throw_malformed(schema, report.errors);
  return std::move(report.normalized);
}

}  // namespace duet
