#pragma once

#include <string>
#include <vector>

#include "duet/schema/types.hpp"

namespace duet {

enum class DualityViolation {
  missing_page,          // navigable subtask without a navigation page
  orphan_nav_page,       // navigation page with no navigable subtask behind it
  excluded_page_in_nav,  // summary/confirmation subtask listed in navigation
  orphan_page_state,     // PageState whose id no subtask owns
  dangling_component,    // component referencing a page that has no PageState
  page_type_mismatch,    // PageState.pageType disagrees with its subtask
};

std::string_view to_string(DualityViolation v) noexcept;

struct DualityEntry {
  DualityViolation violation;
  std::string page_state_id;
  std::string detail;

  bool operator==(const DualityEntry&) const = default;
};

struct DualityReport {
  std::vector<DualityEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t count(DualityViolation v) const noexcept;
  Json to_json() const;
};

// Task-interface duality: subtask <-> navigation page <-> PageState <->
// component. Violations are reported, never thrown.
DualityReport check_duality(const TaskDecomposition& task, const Navigation& navigation,
                            const PageStateMap& pages, const ComponentMap& components);

inline DualityReport check_duality(const TaskDecomposition& task,
                                   const InterfaceDescription& ui) {
  return check_duality(task, ui.navigation, ui.pages, ui.components);
}

}  // namespace duet
