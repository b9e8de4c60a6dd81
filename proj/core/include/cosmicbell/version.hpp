#pragma once

namespace cosmicbell {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace cosmicbell
