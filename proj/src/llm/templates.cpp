#include "duet/llm/templates.hpp"

#include <cctype>

#include "duet/context/hash.hpp"
#include "duet_prompts.inc"  // generated from prompts/*.txt

namespace duet {

namespace {

constexpr std::pair<TemplateId, std::string_view> kNames[] = {
    {TemplateId::task_decompose, "task_decompose"},
    {TemplateId::subtask_refine, "subtask_refine"},
    {TemplateId::navigation_gen, "navigation_gen"},
    {TemplateId::page_state_gen, "page_state_gen"},
    {TemplateId::cardview_gen, "cardview_gen"},
    {TemplateId::data_standardize, "data_standardize"},
    {TemplateId::service_mock, "service_mock"},
    {TemplateId::summary_gen, "summary_gen"},
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Calls on_text for literal runs and on_slot for each slot, in order.
template <class Text, class Slot>
void scan(std::string_view body, Text&& on_text, Slot&& on_slot) {
  std::size_t i = 0;
  std::size_t literal_start = 0;
  while (i < body.size()) {
    if (body[i] != '{') {
      ++i;
      continue;
    }
    if (i + 1 < body.size() && body[i + 1] == '{') {
      auto close = body.find("}}", i + 2);
      i = close == std::string_view::npos ? body.size() : close + 2;
      continue;
    }
    std::size_t j = i + 1;
    while (j < body.size() && ident_char(body[j])) ++j;
    if (j > i + 1 && j < body.size() && body[j] == '}') {
      on_text(body.substr(literal_start, i - literal_start));
      on_slot(body.substr(i + 1, j - i - 1));
      i = j + 1;
      literal_start = i;
    } else {
      ++i;
    }
  }
  on_text(body.substr(literal_start));
}

std::vector<PromptTemplate> build_templates() {
  auto make = [](TemplateId id, std::string_view body, SchemaId schema) {
    return PromptTemplate{id, body, schema, template_slots(body)};
  };
  return {
      make(TemplateId::task_decompose, prompts::task_decompose, SchemaId::task_decomposition),
      make(TemplateId::subtask_refine, prompts::subtask_refine, SchemaId::subtask),
      make(TemplateId::navigation_gen, prompts::navigation_gen, SchemaId::navigation),
      make(TemplateId::page_state_gen, prompts::page_state_gen, SchemaId::page_state),
      make(TemplateId::cardview_gen, prompts::cardview_gen, SchemaId::card_view_config),
      make(TemplateId::data_standardize, prompts::data_standardize, SchemaId::basic_item_list),
      make(TemplateId::service_mock, prompts::service_mock, SchemaId::service_records),
      make(TemplateId::summary_gen, prompts::summary_gen, SchemaId::summary_content),
  };
}

}  // namespace

std::string_view to_string(TemplateId id) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == id) return name;
  }
  return "unknown";
}

std::optional<TemplateId> parse_template_id(std::string_view text) noexcept {
  for (const auto& [k, name] : kNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

const std::vector<TemplateId>& all_template_ids() {
  static const std::vector<TemplateId> ids = [] {
    std::vector<TemplateId> out;
    for (const auto& [k, _] : kNames) out.push_back(k);
    return out;
  }();
  return ids;
}

const PromptTemplate& prompt_template(TemplateId id) {
  static const std::vector<PromptTemplate> templates = build_templates();
  for (const auto& t : templates) {
    if (t.id == id) return t;
  }
  throw Error(ErrorCode::unknown_template, "no template " + std::to_string(static_cast<int>(id)));
}

std::vector<std::string> template_slots(std::string_view body) {
  std::vector<std::string> slots;
  scan(
      body, [](std::string_view) {},
      [&](std::string_view slot) {
        for (const auto& s : slots) {
          if (s == slot) return;
        }
        slots.emplace_back(slot);
      });
  return slots;
}

std::string assemble_body(std::string_view body, const Bindings& bindings) {
  std::string out;
  out.reserve(body.size());
  scan(
      body, [&](std::string_view text) { out.append(text); },
      [&](std::string_view slot) {
        auto it = bindings.find(std::string(slot));
        if (it == bindings.end()) {
          throw Error(ErrorCode::unbound_slot, "slot '" + std::string(slot) + "' is not bound",
                      Json{{"slot", std::string(slot)}});
        }
        out.append(it->second);
      });
  return out;
}

std::string assemble(TemplateId id, const Bindings& bindings) {
  return assemble_body(prompt_template(id).body, bindings);
}

std::string bindings_fingerprint(const Bindings& bindings) {
  Json j = Json::object();
  for (const auto& [k, v] : bindings) j[k] = v;
  return canonical_hash(j).substr(0, 16);
}

std::string repair_suffix(const std::vector<std::string>& violated) {
  std::string list;
  for (const auto& v : violated) {
    if (!list.empty()) list += ", ";
    list += v;
  }
  return "Your previous output violated: " + list + ". Return only corrected JSON.";
}

}  // namespace duet
