#pragma once

namespace lapiths {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lapiths
