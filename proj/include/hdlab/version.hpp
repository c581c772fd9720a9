#pragma once

namespace hdlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hdlab
