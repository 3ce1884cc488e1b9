#pragma once

// Internal unit system: natural units with hbar = c = k_B = 1, energies in GeV.
// All I/O conversions go through the two fixed bridge constants below.

namespace collapse::units {

inline constexpr double hbar_c_gev_cm = 1.9733e-14;  // GeV * cm
inline constexpr double hbar_gev_s = 6.5821e-25;     // GeV * s

// one unit of X, expressed in natural units (GeV powers)
inline constexpr double cm = 1.0 / hbar_c_gev_cm;  // length, GeV^-1
inline constexpr double second = 1.0 / hbar_gev_s; // time, GeV^-1
inline constexpr double km = 1.0e5 * cm;

inline constexpr double gev = 1.0;
inline constexpr double tev = 1.0e3;
inline constexpr double mev = 1.0e-3;
inline constexpr double kev = 1.0e-6;
inline constexpr double ev = 1.0e-9;
inline constexpr double kelvin = 8.617333e-14;  // GeV per K (k_B)

inline constexpr double cm3 = cm * cm * cm;
inline constexpr double gev_per_cm3 = gev / cm3;  // mass density, -> GeV^4

inline constexpr double nucleon_mass = 0.938;       // GeV
inline constexpr double speed_of_light_km_s = 299792.458;

inline constexpr double to_cm(double length_natural) { return length_natural / cm; }
inline constexpr double to_seconds(double time_natural) { return time_natural / second; }
inline constexpr double to_kelvin(double energy_gev) { return energy_gev / kelvin; }

}  // namespace collapse::units
