#pragma once

#include <json.hpp>
#include <string>

namespace underreport {

using Json = nlohmann::json;

// Serialization with every floating-point number printed at 17 significant
// digits so values round-trip bit for bit; indent 2, '\n' line endings.
std::string dump_json_17(const Json& value, int indent = 2);

void write_json_atomic(const std::string& path, const Json& value);

}  // namespace underreport
