#pragma once

namespace topoeval {

inline constexpr const char* kToolName = "topoeval";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace topoeval
