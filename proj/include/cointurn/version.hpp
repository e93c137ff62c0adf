#pragma once

#include <cstdint>

namespace cointurn {

inline constexpr const char kVersion[] = "0.1.0";
inline constexpr std::uint64_t kDefaultMasterSeed = 0x5eedc011u;

}  // namespace cointurn
