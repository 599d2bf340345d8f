#pragma once

namespace zicure {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace zicure
