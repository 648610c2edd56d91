#pragma once

namespace homsim {

/// Speed of light in vacuum [m/s].
inline constexpr double speed_of_light = 299792458.0;

/// Pump durations below this are outside the long-pulse regime the
/// spectral model assumes; callers may warn but computation proceeds.
inline constexpr double long_pulse_floor = 10e-12;  // 10 ps

inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace homsim
