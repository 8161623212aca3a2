#pragma once

namespace tdeflate {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "tdeflate";

}  // namespace tdeflate
