#include "duet/llm/extract.hpp"

#include <optional>
#include <string>

namespace duet {

namespace {

// Content of the first ``` fenced block, without the info string. Returns
// the input unchanged when there is no complete fence.
std::string_view strip_fences(std::string_view raw) {
  auto open = raw.find("```");
  if (open == std::string_view::npos) return raw;
  auto line_end = raw.find('\n', open + 3);
  if (line_end == std::string_view::npos) return raw;
  auto close = raw.find("```", line_end + 1);
  if (close == std::string_view::npos) return raw.substr(line_end + 1);
  return raw.substr(line_end + 1, close - line_end - 1);
}

// Index one past the bracket matching raw[start], honouring JSON strings.
std::optional<std::size_t> balanced_end(std::string_view raw, std::size_t start) {
  std::string stack;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < raw.size(); ++i) {
    char c = raw[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '{': stack.push_back('}'); break;
      case '[': stack.push_back(']'); break;
      case '}':
      case ']':
        if (stack.empty() || stack.back() != c) return std::nullopt;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default: break;
    }
  }
  return std::nullopt;
}

}  // namespace

Json extract_json(std::string_view raw) {
  const std::string_view body = strip_fences(raw);
  bool unbalanced = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{' && body[i] != '[') continue;
    auto end = balanced_end(body, i);
    if (!end) {
      unbalanced = true;
      continue;
    }
    Json parsed = Json::parse(body.begin() + i, body.begin() + *end, nullptr, false);
    if (!parsed.is_discarded()) return parsed;
  }
  if (unbalanced) throw Error(ErrorCode::unbalanced_json, "opening bracket is never closed");
  throw Error(ErrorCode::no_json_found, "no JSON object or array in output");
}

}  // namespace duet
