#pragma once

namespace trackgen {
inline constexpr const char* kVersion = "0.1.0";
}
