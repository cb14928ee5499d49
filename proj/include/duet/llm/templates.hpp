#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "duet/schema/validate.hpp"

namespace duet {

enum class TemplateId {
  task_decompose,
  subtask_refine,
  navigation_gen,
  page_state_gen,
  cardview_gen,
  data_standardize,
  service_mock,
  summary_gen,
};

std::string_view to_string(TemplateId id) noexcept;
std::optional<TemplateId> parse_template_id(std::string_view text) noexcept;
const std::vector<TemplateId>& all_template_ids();

struct PromptTemplate {
  TemplateId id;
  std::string_view body;
  SchemaId response_schema;
  std::vector<std::string> slots;  // in order of first appearance
};

const PromptTemplate& prompt_template(TemplateId id);

using Bindings = std::map<std::string, std::string>;

// Slot names in `body`. A slot is `{identifier}`; `{{...}}` is literal text.
std::vector<std::string> template_slots(std::string_view body);

// Substitutes every slot with its binding, verbatim. Bound text is never
// re-scanned, so braces inside JSON payloads are harmless. Throws
// unbound_slot naming the first missing slot.
std::string assemble_body(std::string_view body, const Bindings& bindings);
std::string assemble(TemplateId id, const Bindings& bindings);

// First 16 hex chars of sha256(canonical JSON of the bindings map).
std::string bindings_fingerprint(const Bindings& bindings);

// Text appended to the prompt when re-asking after a validation failure.
std::string repair_suffix(const std::vector<std::string>& violated);

}  // namespace duet
