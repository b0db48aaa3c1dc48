#pragma once

namespace nvstirap {

inline constexpr const char* version = "1.0.0";

} // namespace nvstirap
