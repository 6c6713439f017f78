#pragma once

namespace blockcg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace blockcg
