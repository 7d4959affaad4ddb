#pragma once

// Physical constants (CODATA 2018) and unit conversions. Only the dynamics
// module is SI; the optics core is dimensionless.

namespace magnus::si {

inline constexpr double planck_reduced = 1.054571817e-34;    // J s
inline constexpr double boltzmann = 1.380649e-23;            // J/K
inline constexpr double bohr_magneton = 9.2740100783e-24;    // J/T
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double speed_of_light = 299792458.0;        // m/s

inline constexpr double kelvin_to_joule(double t) { return t * boltzmann; }
inline constexpr double microkelvin_to_joule(double t) { return t * 1e-6 * boltzmann; }
inline constexpr double amu_to_kg(double m) { return m * atomic_mass_unit; }
inline constexpr double gauss_to_tesla(double b) { return b * 1e-4; }

} // namespace magnus::si
