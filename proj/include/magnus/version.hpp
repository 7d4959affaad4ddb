#pragma once

namespace magnus {

inline constexpr const char* version = "0.1.0";

} // namespace magnus
