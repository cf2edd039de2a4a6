#pragma once

namespace tomowass {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tomowass
