#pragma once

namespace squidcav {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace squidcav
