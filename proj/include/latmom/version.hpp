#pragma once

namespace latmom {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace latmom
