#pragma once

#include <complex>
#include <numbers>

namespace mimcav {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr cplx kI{0.0, 1.0};

}  // namespace mimcav
