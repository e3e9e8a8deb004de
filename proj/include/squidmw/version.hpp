#pragma once

namespace squidmw {

inline constexpr const char* kToolName = "squidmw";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace squidmw
