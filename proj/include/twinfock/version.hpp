#pragma once

namespace twinfock {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace twinfock
