#pragma once

namespace tfridge {

inline constexpr const char* version = "0.1.0";

}  // namespace tfridge
