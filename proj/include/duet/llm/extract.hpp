#pragma once

#include <string_view>

#include "duet/error.hpp"

namespace duet {

// Pulls the first JSON object or array out of model output. Markdown fences
// are stripped first; prose around the value is ignored. Throws no_json_found
// when nothing parses and unbalanced_json when an opening bracket never
// closes.
Json extract_json(std::string_view raw);

}  // namespace duet
