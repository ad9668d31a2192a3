#pragma once

#include <numbers>
#include <string_view>

namespace trimode {

// CODATA 2018 exact values (SI)
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double k_boltzmann = 1.380649e-23; // J/K
inline constexpr double c_light = 299792458.0;      // m/s

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// bumped on any change that affects numerical output; part of the sweep cache key
inline constexpr std::string_view version_string = "1.0.0";

} // namespace trimode
