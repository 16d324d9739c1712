#pragma once

namespace projprime {
inline constexpr const char* kVersion = "1.0.0";
}
