#pragma once

#include <numbers>

namespace unibike {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace unibike
