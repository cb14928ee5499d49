#include "duet/schema/types.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "duet/schema/actions.hpp"

namespace duet {

namespace {

bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(PageType type) noexcept {
  switch (type) {
    case PageType::list: return "list";
    case PageType::detail: return "detail";
    case PageType::form: return "form";
    case PageType::summary: return "summary";
    case PageType::confirmation: return "confirmation";
  }
  return "list";
}

std::optional<PageType> parse_page_type(std::string_view text) noexcept {
  for (auto t : {PageType::list, PageType::detail, PageType::form, PageType::summary,
                 PageType::confirmation}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

const Subtask* TaskDecomposition::find(std::string_view subtask_id) const noexcept {
  for (const auto& s : subtasks) {
    if (s.subtask_id == subtask_id) return &s;
  }
  return nullptr;
}

double price_total(const Price& price) noexcept {
  if (const auto* scalar = std::get_if<double>(&price)) return *scalar;
  double sum = 0.0;
  for (const auto& part : std::get<std::vector<PriceDetail>>(price)) sum += part.amount;
  return sum;
}

const AttributeDetail* BasicItem::attribute(std::string_view key) const noexcept {
  for (const auto& a : extended_attributes) {
    if (a.key == key) return &a;
  }
  return nullptr;
}

std::vector<std::string> Navigation::page_state_ids() const {
  std::vector<std::string> ids;
  for (const auto& g : page_groups) {
    for (const auto& p : g.pages) ids.push_back(p.page_state_id);
  }
  return ids;
}

std::size_t Navigation::page_count() const noexcept {
  std::size_t n = 0;
  for (const auto& g : page_groups) n += g.pages.size();
  return n;
}

std::string_view to_string(DashboardValueType type) noexcept {
  switch (type) {
    case DashboardValueType::number: return "number";
    case DashboardValueType::string: return "string";
    case DashboardValueType::date: return "date";
  }
  return "string";
}

std::string_view component_kind(const ComponentConfig& config) noexcept {
  struct Visitor {
    std::string_view operator()(const CardViewConfig&) const { return "cardView"; }
    std::string_view operator()(const PriceComponentConfig&) const { return "price"; }
    std::string_view operator()(const TitleComponentConfig&) const { return "title"; }
    std::string_view operator()(const InputFieldConfig&) const { return "inputField"; }
    std::string_view operator()(const SelectionConfig&) const { return "selection"; }
    std::string_view operator()(const ActionButtonConfig&) const { return "actionButton"; }
    std::string_view operator()(const SliderConfig&) const { return "slider"; }
    std::string_view operator()(const DatePickerConfig&) const { return "datePicker"; }
    std::string_view operator()(const DashboardConfig&) const { return "dashboard"; }
    std::string_view operator()(const NavigationCardConfig&) const { return "navigationCard"; }
  };
  return std::visit(Visitor{}, config);
}

std::optional<std::string> Component::referenced_page() const {
  if (const auto* c = std::get_if<CardViewConfig>(&config)) return c->page_state_id;
  if (const auto* c = std::get_if<NavigationCardConfig>(&config)) return c->page_state_id;
  return std::nullopt;
}

std::optional<std::string> Component::value_key() const {
  if (const auto* c = std::get_if<InputFieldConfig>(&config)) return c->value_key;
  if (const auto* c = std::get_if<SelectionConfig>(&config)) return c->value_key;
  if (const auto* c = std::get_if<SliderConfig>(&config)) return c->value_key;
  if (const auto* c = std::get_if<DatePickerConfig>(&config)) return c->value_key;
  return std::nullopt;
}

std::vector<std::string> nav_block_placeholders(std::string_view markdown) {
  static const std::regex pattern(R"(\{\{nav-block:([^}]*)\}\})");
  std::vector<std::string> ids;
  std::string text(markdown);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern);
       it != std::sregex_iterator(); ++it) {
    ids.push_back((*it)[1].str());
  }
  return ids;
}

const Component* InterfaceDescription::find_component(std::string_view page_state_id,
                                                      std::string_view component_id) const noexcept {
  auto it = components.find(std::string(page_state_id));
  if (it == components.end()) return nullptr;
  for (const auto& c : it->second) {
    if (c.component_id == component_id) return &c;
  }
  return nullptr;
}

// ---- actions ------------------------------------------------------------------

std::string_view to_string(TaskStage stage) noexcept {
  switch (stage) {
    case TaskStage::define: return "Define";
    case TaskStage::empathize: return "Empathize";
    case TaskStage::plan: return "Plan";
    case TaskStage::explore: return "Explore";
    case TaskStage::refine: return "Refine";
    case TaskStage::duet: return "Duet";
  }
  return "Define";
}

std::optional<TaskStage> parse_task_stage(std::string_view text) noexcept {
  for (int i = 0; i < kStageCount; ++i) {
    auto stage = static_cast<TaskStage>(i);
    if (iequals(to_string(stage), text)) return stage;
  }
  return std::nullopt;
}

std::string_view to_string(Actor actor) noexcept {
  return actor == Actor::user ? "user" : "agent";
}

std::optional<Actor> parse_actor(std::string_view text) noexcept {
  if (text == "user") return Actor::user;
  if (text == "agent") return Actor::agent;
  return std::nullopt;
}

namespace {

constexpr std::pair<ActionKind, std::string_view> kKindNames[] = {
    {ActionKind::input, "input"},
    {ActionKind::select, "select"},
    {ActionKind::click, "click"},
    {ActionKind::slide, "slide"},
    {ActionKind::pick_date, "pick_date"},
    {ActionKind::reorder, "reorder"},
    {ActionKind::favorite, "favorite"},
    {ActionKind::confirm, "confirm"},
    {ActionKind::navigate, "navigate"},
    {ActionKind::agent_search, "agent_search"},
    {ActionKind::agent_recommend, "agent_recommend"},
    {ActionKind::agent_commit_task, "agent_commit_task"},
    {ActionKind::agent_commit_interface, "agent_commit_interface"},
    {ActionKind::agent_loop_failed, "agent_loop_failed"},
    {ActionKind::stage_change, "stage_change"},
};

}  // namespace

std::string_view to_string(ActionKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "input";
}

std::optional<ActionKind> parse_action_kind(std::string_view text) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

bool is_user_kind(ActionKind kind) noexcept {
  switch (kind) {
    case ActionKind::input:
    case ActionKind::select:
    case ActionKind::click:
    case ActionKind::slide:
    case ActionKind::pick_date:
    case ActionKind::reorder:
    case ActionKind::favorite:
    case ActionKind::confirm:
    case ActionKind::navigate:
      return true;
    default:
      return false;
  }
}

bool is_engine_written_kind(ActionKind kind) noexcept {
  return kind == ActionKind::agent_commit_task || kind == ActionKind::agent_commit_interface ||
         kind == ActionKind::stage_change;
}

std::optional<std::string> ActionRecord::value_key() const {
  if (target && target->value_key) return target->value_key;
  if (payload.is_object()) {
    auto it = payload.find("valueKey");
    if (it != payload.end() && it->is_string()) return it->get<std::string>();
  }
  return std::nullopt;
}

}  // namespace duet
