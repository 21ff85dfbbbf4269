#pragma once

namespace pgs {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace pgs
