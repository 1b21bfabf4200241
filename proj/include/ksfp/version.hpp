#pragma once

namespace ksfp {

inline constexpr const char* version = "0.1.0";

} // namespace ksfp
