#pragma once

namespace vodsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vodsim
