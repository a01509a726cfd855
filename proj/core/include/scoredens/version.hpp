#pragma once

namespace scoredens {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace scoredens
