#pragma once

namespace colnet {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "colnet";

}  // namespace colnet
