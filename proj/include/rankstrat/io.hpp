#pragma once

#include <string>

#include "json.hpp"

namespace rankstrat {

/// Insertion-ordered JSON, so emitted key order follows construction order.
using Json = nlohmann::ordered_json;

/// Serializes with floating-point numbers in shortest round-trip form, so
/// parsing the output restores every value bit for bit. indent < 0 gives a
/// single line.
std::string dump_json(const Json& value, int indent = 2);

/// Writes via a sibling temporary file and rename; no partial file is left
/// behind on failure. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace rankstrat
