#ifndef TLI_CONSTANTS_HPP
#define TLI_CONSTANTS_HPP

#include <numbers>

// CODATA 2018 values (SI). Exact where the SI definition fixes them.
namespace tli::constants {

inline constexpr double planck = 6.62607015e-34;             // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double speed_of_light = 299792458.0;        // m/s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double electron_mass = 9.1093837015e-31;    // kg
inline constexpr double vacuum_permeability = 1.25663706212e-6; // N/A^2

inline constexpr double electron_volt = elementary_charge; // J per eV

} // namespace tli::constants

#endif // TLI_CONSTANTS_HPP
