#pragma once

// Wire-visible data model shared by every agent and by the UI client.
//
// Field names on the wire follow the published schemas verbatim: the task
// layer is snake_case, the interface layer camelCase. Each struct keeps
// unrecognised fields in `extra` so they survive a parse/serialize cycle.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "duet/error.hpp"

namespace duet {

enum class PageType { list, detail, form, summary, confirmation };

std::string_view to_string(PageType type) noexcept;
std::optional<PageType> parse_page_type(std::string_view text) noexcept;

// Summary and confirmation pages are reachable only through navigation cards,
// never from the navigation menu.
constexpr bool is_navigable(PageType type) noexcept {
  return type != PageType::summary && type != PageType::confirmation;
}

// ---- task layer -----------------------------------------------------------

struct AvailableApi {
  std::string api_name;
  Json payload = Json::object();
  Json extra = Json::object();

  bool operator==(const AvailableApi&) const = default;
};

struct Subtask {
  std::string subtask_name;
  std::string subtask_id;
  std::int64_t step_id = 0;
  std::optional<std::string> description;
  std::vector<AvailableApi> matched_apis;
  std::vector<std::string> dependent_subtasks;
  std::optional<PageType> page_type;
  std::optional<std::string> page_state_id;
  Json extra = Json::object();

  bool has_page() const noexcept { return page_type.has_value() && page_state_id.has_value(); }
  bool operator==(const Subtask&) const = default;
};

struct TaskDecomposition {
  std::string goal;
  std::vector<Subtask> subtasks;
  Json extra = Json::object();

  const Subtask* find(std::string_view subtask_id) const noexcept;
  bool operator==(const TaskDecomposition&) const = default;
};

// ---- data layer -----------------------------------------------------------

struct PriceDetail {
  std::string label;
  double amount = 0.0;
  Json extra = Json::object();

  bool operator==(const PriceDetail&) const = default;
};

struct AttributeDetail {
  std::string key;
  Json value;  // string or number
  Json extra = Json::object();

  bool operator==(const AttributeDetail&) const = default;
};

using Price = std::variant<double, std::vector<PriceDetail>>;

// Lowest amount a price represents: the scalar itself, or the sum of the
// components of a breakdown.
double price_total(const Price& price) noexcept;

struct BasicItem {
  Json id;  // string or integer
  std::string title;
  std::optional<std::string> description;
  std::vector<std::string> tags;
  std::optional<Price> price;
  std::vector<AttributeDetail> extended_attributes;
  std::optional<std::string> image_query;
  Json extra = Json::object();

  const AttributeDetail* attribute(std::string_view key) const noexcept;
  bool operator==(const BasicItem&) const = default;
};

// ---- interface layer: navigation and pages --------------------------------

struct NavigationPage {
  std::string pagename;
  std::string page_state_id;
  Json extra = Json::object();

  bool operator==(const NavigationPage&) const = default;
};

struct PageGroup {
  std::string groupname;
  std::string groupicon;
  std::vector<NavigationPage> pages;
  Json extra = Json::object();

  bool operator==(const PageGroup&) const = default;
};

inline constexpr std::size_t kMaxPageGroups = 3;
inline constexpr std::size_t kMaxPagesPerGroup = 5;
inline constexpr std::size_t kMaxNavigablePages = kMaxPageGroups * kMaxPagesPerGroup;

struct Navigation {
  std::vector<PageGroup> page_groups;
  std::int64_t initial_group_index = 0;
  Json extra = Json::object();

  std::vector<std::string> page_state_ids() const;
  std::size_t page_count() const noexcept;
  bool operator==(const Navigation&) const = default;
};

struct PageState {
  std::string session_id;
  std::string page_state_id;
  PageType page_type = PageType::list;
  Json state_detail = Json::object();
  std::optional<std::int64_t> last_updated;  // epoch ms, stamped by the engine
  Json extra = Json::object();

  bool operator==(const PageState&) const = default;
};

// ---- interface layer: components -------------------------------------------

struct CardViewConfig {
  std::string page_state_id;
  std::string item_data_key;
  std::vector<std::string> displayed_attributes;
  bool enable_favorites = false;
  bool is_sort_enabled = false;

  bool operator==(const CardViewConfig&) const = default;
};

struct PriceComponentConfig {
  Json value;  // number or string
  std::string prefix = "USD";

  bool operator==(const PriceComponentConfig&) const = default;
};

struct TitleComponentConfig {
  std::string value;
  std::int64_t level = 3;

  bool operator==(const TitleComponentConfig&) const = default;
};

struct InputFieldConfig {
  std::string label;
  std::string placeholder;
  std::string value_key;

  bool operator==(const InputFieldConfig&) const = default;
};

struct SelectionOption {
  std::string label;
  Json value;  // scalar; defaults to the label when given as a bare string

  bool operator==(const SelectionOption&) const = default;
};

struct SelectionConfig {
  std::string label;
  std::vector<SelectionOption> options;
  std::string value_key;

  bool operator==(const SelectionConfig&) const = default;
};

struct ActionButtonConfig {
  std::string label;
  std::string action_id;

  bool operator==(const ActionButtonConfig&) const = default;
};

struct SliderConfig {
  std::string label;
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;
  std::string value_key;
  std::string unit;

  bool operator==(const SliderConfig&) const = default;
};

struct DatePickerConfig {
  std::string label;
  std::string value_key;

  bool operator==(const DatePickerConfig&) const = default;
};

enum class DashboardValueType { number, string, date };

std::string_view to_string(DashboardValueType type) noexcept;

struct DashboardItem {
  std::string id;
  std::string label;
  Json value;
  DashboardValueType type = DashboardValueType::string;
  std::optional<std::string> unit;
  std::optional<Json> edit_options;  // opaque until the format is pinned down
  Json extra = Json::object();

  bool operator==(const DashboardItem&) const = default;
};

struct DashboardConfig {
  std::vector<DashboardItem> items;

  bool operator==(const DashboardConfig&) const = default;
};

struct NavigationCardConfig {
  std::string page_state_id;
  std::string title;
  std::string summary;

  bool operator==(const NavigationCardConfig&) const = default;
};

using ComponentConfig =
    std::variant<CardViewConfig, PriceComponentConfig, TitleComponentConfig, InputFieldConfig,
                 SelectionConfig, ActionButtonConfig, SliderConfig, DatePickerConfig,
                 DashboardConfig, NavigationCardConfig>;

// Wire discriminator ("cardView", "selection", ...).
std::string_view component_kind(const ComponentConfig& config) noexcept;

// A component placed on a page. `component_id` is unique within its page and
// is what user actions target.
struct Component {
  std::string component_id;
  ComponentConfig config;
  Json extra = Json::object();

  std::string_view kind() const noexcept { return component_kind(config); }
  // The pageStateId embedded in the config, if the kind carries one.
  std::optional<std::string> referenced_page() const;
  // Value key written by input-like components.
  std::optional<std::string> value_key() const;
  bool operator==(const Component&) const = default;
};

// ---- summary view -----------------------------------------------------------

struct ViewNavigationBlockConfig {
  std::string page_state_id;
  std::string title;
  Json extra = Json::object();

  bool operator==(const ViewNavigationBlockConfig&) const = default;
};

struct SummaryContent {
  std::optional<DashboardConfig> dashboard_config;
  std::string content;  // markdown with {{nav-block:<id>}} placeholders
  std::optional<std::map<std::string, ViewNavigationBlockConfig>> navigation_blocks;
  Json extra = Json::object();

  bool operator==(const SummaryContent&) const = default;
};

// Block ids named by `{{nav-block:<id>}}` placeholders, in order of appearance.
std::vector<std::string> nav_block_placeholders(std::string_view markdown);

// ---- interface description ----------------------------------------------------

using PageStateMap = std::map<std::string, PageState>;
using ComponentMap = std::map<std::string, std::vector<Component>>;

struct InterfaceDescription {
  Navigation navigation;
  PageStateMap pages;
  ComponentMap components;

  const Component* find_component(std::string_view page_state_id,
                                  std::string_view component_id) const noexcept;
  bool operator==(const InterfaceDescription&) const = default;
};

}  // namespace duet
