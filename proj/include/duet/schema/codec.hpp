#pragma once

// Canonical interchange format: UTF-8 JSON, object keys in sorted order, no
// insignificant whitespace, absent optionals omitted. Two equal values always
// produce identical bytes, which is what snapshot hashes and binding
// fingerprints rely on.

#include <string>
#include <string_view>
#include <vector>

#include "duet/schema/actions.hpp"
#include "duet/schema/types.hpp"
#include "duet/schema/validate.hpp"

namespace duet {

Json to_json(const AvailableApi& v);
Json to_json(const Subtask& v);
Json to_json(const TaskDecomposition& v);
Json to_json(const PriceDetail& v);
Json to_json(const AttributeDetail& v);
Json to_json(const BasicItem& v);
Json to_json(const std::vector<BasicItem>& v);
Json to_json(const NavigationPage& v);
Json to_json(const PageGroup& v);
Json to_json(const Navigation& v);
Json to_json(const PageState& v);
Json to_json(const Component& v);
Json to_json(const CardViewConfig& v);
Json to_json(const DashboardItem& v);
Json to_json(const DashboardConfig& v);
Json to_json(const ViewNavigationBlockConfig& v);
Json to_json(const SummaryContent& v);
Json to_json(const PageStateMap& v);
Json to_json(const ComponentMap& v);
Json to_json(const ActionTarget& v);
Json to_json(const ActionDraft& v);
Json to_json(const ActionRecord& v);

// Compact sorted-key dump of any JSON value. Throws malformed_document if the
// value holds invalid UTF-8.
std::string canonical_dump(const Json& value);

template <class T>
std::string serialize(const T& value) {
  return canonical_dump(to_json(value));
}

// Parses bytes and validates them against the schema for T. Syntax errors and
// schema violations both raise malformed_document; the issue list is in
// Error::detail()["issues"].
Json parse_json(std::string_view bytes);

template <class T>
T parse(std::string_view bytes);

template <>
TaskDecomposition parse<TaskDecomposition>(std::string_view bytes);
template <>
Subtask parse<Subtask>(std::string_view bytes);
template <>
BasicItem parse<BasicItem>(std::string_view bytes);
template <>
std::vector<BasicItem> parse<std::vector<BasicItem>>(std::string_view bytes);
template <>
Navigation parse<Navigation>(std::string_view bytes);
template <>
PageState parse<PageState>(std::string_view bytes);
template <>
Component parse<Component>(std::string_view bytes);
template <>
SummaryContent parse<SummaryContent>(std::string_view bytes);
template <>
ActionRecord parse<ActionRecord>(std::string_view bytes);

// Runtime-dispatched form used by the CLI and the HTTP layer.
Json parse(std::string_view bytes, SchemaId schema);

}  // namespace duet
