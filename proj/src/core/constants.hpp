#pragma once

namespace kljn::constants {

// 2019 SI exact values.
inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double planck = 6.62607015e-34;       // J*s
inline constexpr double speed_of_light = 2.99792458e8; // m/s

inline constexpr double pi = 3.14159265358979323846;

} // namespace kljn::constants
