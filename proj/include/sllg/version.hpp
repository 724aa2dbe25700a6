#pragma once

namespace sllg {

inline constexpr const char* kVersion = "0.1.0";

} // namespace sllg
