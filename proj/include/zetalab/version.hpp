#pragma once

namespace zetalab {

inline constexpr const char* kVersion = "0.1.0";

} // namespace zetalab
