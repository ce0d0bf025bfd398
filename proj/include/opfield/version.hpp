#pragma once

namespace opfield {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace opfield
