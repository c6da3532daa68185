#pragma once

namespace underreport {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace underreport
