#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "duet/schema/actions.hpp"
#include "duet/schema/types.hpp"

namespace duet {

enum class SchemaId {
  task_decomposition,
  subtask,
  available_api,
  basic_item,
  basic_item_list,
  price_detail,
  attribute_detail,
  navigation,
  page_group,
  navigation_page,
  page_state,
  component,
  card_view_config,
  summary_content,
  dashboard_item,
  dashboard_config,
  action_draft,
  action_record,
  service_records,
};

// Wire name, e.g. "TaskDecomposition", "ComponentConfig".
std::string_view to_string(SchemaId id) noexcept;
std::optional<SchemaId> parse_schema_id(std::string_view name) noexcept;
const std::vector<SchemaId>& all_schema_ids();

enum class IssueCode { unknown_schema, field_missing, type_mismatch, invariant_violated };

std::string_view to_string(IssueCode code) noexcept;

struct Issue {
  IssueCode code = IssueCode::invariant_violated;
  std::string path;  // JSON pointer into the validated document
  std::string name;  // invariant name for invariant_violated, expected type for type_mismatch
  std::string message;

  Json to_json() const;
  bool operator==(const Issue&) const = default;
};

using Issues = std::vector<Issue>;

Json to_json(const Issues& issues);
// "invariant 'max-3-groups' at /pageGroups" style one-liners, joined by "; ".
std::string describe(const Issues& issues);

template <class T>
struct Validated {
  std::optional<T> value;
  Issues errors;
  Issues warnings;

  bool ok() const noexcept { return value.has_value() && errors.empty(); }
};

// Typed validation. Never throws for bad input; every problem becomes an
// Issue. Out-of-vocabulary group icons are downgraded to "default" with a
// warning instead of failing.
Validated<TaskDecomposition> validate_task_decomposition(const Json& doc);
Validated<Subtask> validate_subtask(const Json& doc);
Validated<AvailableApi> validate_available_api(const Json& doc);
Validated<BasicItem> validate_basic_item(const Json& doc);
Validated<std::vector<BasicItem>> validate_basic_item_list(const Json& doc);
Validated<PriceDetail> validate_price_detail(const Json& doc);
Validated<AttributeDetail> validate_attribute_detail(const Json& doc);
Validated<Navigation> validate_navigation(const Json& doc);
Validated<PageGroup> validate_page_group(const Json& doc);
Validated<NavigationPage> validate_navigation_page(const Json& doc);
Validated<PageState> validate_page_state(const Json& doc);
Validated<Component> validate_component(const Json& doc);
// Bare CardView config, without the componentId/kind envelope.
Validated<CardViewConfig> validate_card_view_config(const Json& doc);
Validated<SummaryContent> validate_summary_content(const Json& doc);
Validated<DashboardItem> validate_dashboard_item(const Json& doc);
Validated<DashboardConfig> validate_dashboard_config(const Json& doc);
Validated<ActionDraft> validate_action_draft(const Json& doc);
Validated<ActionRecord> validate_action_record(const Json& doc);

// Result of runtime-dispatched validation. `normalized` is the canonical
// re-serialization of the typed value when validation succeeded.
struct ValidationReport {
  SchemaId schema = SchemaId::task_decomposition;
  Issues errors;
  Issues warnings;
  Json normalized;

  bool ok() const noexcept { return errors.empty(); }
  Json to_json() const;
};

ValidationReport validate(SchemaId schema, const Json& doc);
// Unregistered names yield a single unknown_schema issue.
ValidationReport validate(std::string_view schema_name, const Json& doc);

// Checks that need the whole interface, not just one document.
Issues check_cardview_against_model(const CardViewConfig& config, const Json& item_model);
Issues check_summary_references(const SummaryContent& summary,
                                const std::vector<std::string>& live_page_state_ids);
// Page map keys agree with their pageStateId; component ids are unique per page.
Issues validate_interface(const InterfaceDescription& ui);

// Raw mock-service output: an array of records, a wrapper object holding one,
// or a single record. Normalized to an array of objects.
Validated<Json> validate_service_records(const Json& doc);

}  // namespace duet
