#pragma once

#include <numbers>

namespace squidcav::constants {

/// CODATA 2018 values. h and e are exact by SI definition; all derived
/// constants are computed from them so results are bit-reproducible.
inline constexpr double pi = std::numbers::pi;
inline constexpr double h_planck = 6.62607015e-34;       // J s (exact)
inline constexpr double e_charge = 1.602176634e-19;      // C (exact)
inline constexpr double mu_0 = 1.25663706212e-6;         // N A^-2
inline constexpr double hbar = h_planck / (2.0 * pi);    // J s
inline constexpr double phi_0 = h_planck / (2.0 * e_charge);  // Wb, flux quantum

/// Human-facing unit conversions. The library is strict SI internally
/// (energies in joules, all frequencies angular in rad/s); GHz, fF, pH and uA
/// appear only at the I/O boundary.
inline constexpr double ghz_to_rad_per_s(double f_ghz) { return 2.0 * pi * 1e9 * f_ghz; }
inline constexpr double rad_per_s_to_ghz(double w) { return w / (2.0 * pi * 1e9); }
inline constexpr double femtofarad = 1e-15;
inline constexpr double picohenry = 1e-12;
inline constexpr double microampere = 1e-6;
inline constexpr double microsecond = 1e-6;

}  // namespace squidcav::constants
