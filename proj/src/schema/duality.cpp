#include "duet/schema/duality.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace duet {

std::string_view to_string(DualityViolation v) noexcept {
  switch (v) {
    case DualityViolation::missing_page: return "missing_page";
    case DualityViolation::orphan_nav_page: return "orphan_nav_page";
    case DualityViolation::excluded_page_in_nav: return "excluded_page_in_nav";
    case DualityViolation::orphan_page_state: return "orphan_page_state";
    case DualityViolation::dangling_component: return "dangling_component";
    case DualityViolation::page_type_mismatch: return "page_type_mismatch";
  }
  return "missing_page";
}

std::size_t DualityReport::count(DualityViolation v) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [v](const DualityEntry& e) { return e.violation == v; }));
}

Json DualityReport::to_json() const {
  Json arr = Json::array();
  for (const auto& e : entries) {
    arr.push_back(Json{{"violation", std::string(to_string(e.violation))},
                       {"pageStateId", e.page_state_id},
                       {"detail", e.detail}});
  }
  return arr;
}

DualityReport check_duality(const TaskDecomposition& task, const Navigation& navigation,
                            const PageStateMap& pages, const ComponentMap& components) {
  DualityReport report;
  auto add = [&](DualityViolation v, const std::string& id, std::string detail) {
    report.entries.push_back({v, id, std::move(detail)});
  };

  std::map<std::string, const Subtask*> owners;
  for (const auto& s : task.subtasks) {
    if (s.has_page()) owners.emplace(*s.page_state_id, &s);
  }
  std::set<std::string> in_nav;
  for (const auto& id : navigation.page_state_ids()) in_nav.insert(id);

  // (a) every navigable subtask appears in the navigation exactly once.
  for (const auto& s : task.subtasks) {
    if (!s.has_page() || !is_navigable(*s.page_type)) continue;
    if (!in_nav.count(*s.page_state_id)) {
      add(DualityViolation::missing_page, *s.page_state_id,
          "subtask '" + s.subtask_id + "' has no navigation page");
    }
  }
  for (const auto& id : in_nav) {
    auto it = owners.find(id);
    if (it == owners.end()) {
      add(DualityViolation::orphan_nav_page, id, "navigation page has no subtask");
    } else if (!is_navigable(*it->second->page_type)) {
      add(DualityViolation::excluded_page_in_nav, id,
          std::string(to_string(*it->second->page_type)) + " page listed in navigation");
    }
  }

  // (b) every PageState is owned by a subtask of the same type.
  for (const auto& [id, page] : pages) {
    auto it = owners.find(id);
    if (it == owners.end()) {
      add(DualityViolation::orphan_page_state, id, "PageState has no subtask");
    } else if (*it->second->page_type != page.page_type) {
      add(DualityViolation::page_type_mismatch, id,
          "PageState is " + std::string(to_string(page.page_type)) + ", subtask '" +
              it->second->subtask_id + "' is " + std::string(to_string(*it->second->page_type)));
    }
  }

  // (c) components only live on, and point at, pages that exist.
  for (const auto& [page_id, list] : components) {
    if (!pages.count(page_id)) {
      add(DualityViolation::dangling_component, page_id,
          "components keyed under a page without PageState");
    }
    for (const auto& c : list) {
      auto ref = c.referenced_page();
      if (ref && !pages.count(*ref)) {
        add(DualityViolation::dangling_component, *ref,
            "component '" + c.component_id + "' on '" + page_id + "' references a missing page");
      }
    }
  }
  return report;
}

}  // namespace duet
