#pragma once

#include <numbers>

namespace isac {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace isac
