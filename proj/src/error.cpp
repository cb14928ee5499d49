#include "duet/error.hpp"

namespace duet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::unknown_schema: return "UnknownSchema";
    case ErrorCode::malformed_document: return "MalformedDocument";
    case ErrorCode::validation_failed: return "ValidationFailed";
    case ErrorCode::duality_violated: return "DualityViolated";
    case ErrorCode::empty_goal: return "EmptyGoal";
    case ErrorCode::unknown_session: return "UnknownSession";
    case ErrorCode::session_exists: return "SessionExists";
    case ErrorCode::dangling_target: return "DanglingTarget";
    case ErrorCode::stale_base: return "StaleBase";
    case ErrorCode::illegal_transition: return "IllegalTransition";
    case ErrorCode::unknown_template: return "UnknownTemplate";
    case ErrorCode::unbound_slot: return "UnboundSlot";
    case ErrorCode::no_json_found: return "NoJsonFound";
    case ErrorCode::unbalanced_json: return "UnbalancedJson";
    case ErrorCode::provider_unreachable: return "ProviderUnreachable";
    case ErrorCode::exhausted_attempts: return "ExhaustedAttempts";
    case ErrorCode::timeout: return "Timeout";
    case ErrorCode::missing_fixture: return "MissingFixture";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::empty_plan: return "EmptyPlan";
    case ErrorCode::unknown_subtask: return "UnknownSubtask";
    case ErrorCode::capacity_exceeded: return "CapacityExceeded";
    case ErrorCode::unknown_api: return "UnknownApi";
    case ErrorCode::unresolvable_reference: return "UnresolvableReference";
    case ErrorCode::loop_failed: return "LoopFailed";
    case ErrorCode::quiesce_timeout: return "QuiesceTimeout";
    case ErrorCode::corrupt_persisted_document: return "CorruptPersistedDocument";
    case ErrorCode::schema_version_mismatch: return "SchemaVersionMismatch";
    case ErrorCode::assertion_failed: return "AssertionFailed";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, Json detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(std::move(detail)) {}

Json Error::to_json() const {
  return Json{{"error", std::string(to_string(code_))}, {"message", what()}, {"detail", detail_}};
}

bool is_gateway_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::provider_unreachable:
    case ErrorCode::exhausted_attempts:
    case ErrorCode::timeout:
    case ErrorCode::missing_fixture:
    case ErrorCode::unbound_slot:
    case ErrorCode::unknown_template:
      return true;
    default:
      return false;
  }
}

}  // namespace duet
