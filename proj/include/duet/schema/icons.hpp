#pragma once

#include <array>
#include <string_view>

namespace duet {

// Closed icon vocabulary for navigation groups. Anything else renders as
// kDefaultIcon.
inline constexpr std::array<std::string_view, 24> kGroupIcons = {
    "home",     "search",   "calendar", "map",     "wallet",   "flight",
    "hotel",    "food",     "shopping", "star",    "heart",    "list",
    "settings", "user",     "info",     "compass", "camera",   "ticket",
    "car",      "train",    "chart",    "book",    "check",    "message",
};

inline constexpr std::string_view kDefaultIcon = "default";

constexpr bool is_known_icon(std::string_view icon) noexcept {
  if (icon == kDefaultIcon) return true;
  for (auto known : kGroupIcons) {
    if (known == icon) return true;
  }
  return false;
}

}  // namespace duet
