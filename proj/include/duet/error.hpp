#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace duet {

using Json = nlohmann::json;

enum class ErrorCode {
  // schema
  unknown_schema,
  malformed_document,
  validation_failed,
  duality_violated,
  // context
  empty_goal,
  unknown_session,
  session_exists,
  dangling_target,
  stale_base,
  illegal_transition,
  // gateway
  unknown_template,
  unbound_slot,
  no_json_found,
  unbalanced_json,
  provider_unreachable,
  exhausted_attempts,
  timeout,
  missing_fixture,
  config_error,
  // agents
  empty_plan,
  unknown_subtask,
  capacity_exceeded,
  unknown_api,
  unresolvable_reference,
  // orchestration and service
  loop_failed,
  quiesce_timeout,
  corrupt_persisted_document,
  schema_version_mismatch,
  assertion_failed,
};

std::string_view to_string(ErrorCode code) noexcept;

// Errors raised by engine operations. `detail` carries structured context
// (issue lists, duality reports, attempt traces) in wire format.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, Json detail = Json::object());

  ErrorCode code() const noexcept { return code_; }
  const Json& detail() const noexcept { return detail_; }

  Json to_json() const;

 private:
  ErrorCode code_;
  Json detail_;
};

// True for the failures that originate in the LLM gateway; agents pass these
// through unchanged.
bool is_gateway_failure(ErrorCode code) noexcept;

}  // namespace duet
