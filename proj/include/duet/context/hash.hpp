#pragma once

#include <string>
#include <string_view>

#include "duet/error.hpp"

namespace duet {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

// SHA-256 of the canonical serialization of `value`.
std::string canonical_hash(const Json& value);

}  // namespace duet
