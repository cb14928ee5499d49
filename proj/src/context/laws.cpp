#include "duet/context/laws.hpp"

namespace duet {

namespace {

std::int64_t payload_int(const ActionRecord& r, const char* key) {
  if (!r.payload.is_object() || !r.payload.contains(key) || !r.payload[key].is_number_integer()) {
    return -1;
  }
  return r.payload[key].get<std::int64_t>();
}

}  // namespace

std::optional<std::string> check_gapless(const std::vector<ActionRecord>& history) {
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto want = static_cast<std::int64_t>(i + 1);
    if (history[i].seq != want) {
      return "record " + std::to_string(i) + " has seq " + std::to_string(history[i].seq) +
             ", expected " + std::to_string(want);
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_prefix(const std::vector<ActionRecord>& earlier,
                                        const std::vector<ActionRecord>& later) {
  if (later.size() < earlier.size()) {
    return "history shrank from " + std::to_string(earlier.size()) + " to " +
           std::to_string(later.size()) + " records";
  }
  for (std::size_t i = 0; i < earlier.size(); ++i) {
    if (!(earlier[i] == later[i])) return "record seq " + std::to_string(earlier[i].seq) + " changed";
  }
  return std::nullopt;
}

std::optional<std::string> check_version_monotonicity(const std::vector<ActionRecord>& history) {
  std::int64_t task = 0;
  std::int64_t ui = 0;
  for (const auto& r : history) {
    if (r.kind == ActionKind::agent_commit_task) {
      const auto v = payload_int(r, "taskVersion");
      if (v <= task) {
        return "seq " + std::to_string(r.seq) + ": taskVersion " + std::to_string(v) +
               " after " + std::to_string(task);
      }
      task = v;
    } else if (r.kind == ActionKind::agent_commit_interface) {
      const auto v = payload_int(r, "interfaceVersion");
      if (v <= ui) {
        return "seq " + std::to_string(r.seq) + ": interfaceVersion " + std::to_string(v) +
               " after " + std::to_string(ui);
      }
      ui = v;
      const auto base = payload_int(r, "taskVersion");
      if (base > task) {
        return "seq " + std::to_string(r.seq) + ": interface built on uncommitted taskVersion " +
               std::to_string(base);
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_loop_ordering(const std::vector<ActionRecord>& history,
                                               bool quiescent) {
  std::optional<std::int64_t> open;
  for (const auto& r : history) {
    if (r.kind == ActionKind::agent_commit_task) {
      if (open) {
        return "task commit at seq " + std::to_string(*open) +
               " has no interface commit before seq " + std::to_string(r.seq);
      }
      open = r.seq;
    } else if (r.kind == ActionKind::agent_commit_interface) {
      open.reset();
    }
  }
  if (open && quiescent) {
    return "task commit at seq " + std::to_string(*open) + " never got an interface commit";
  }
  return std::nullopt;
}

}  // namespace duet
