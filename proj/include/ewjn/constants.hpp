#pragma once

// Physical constants in CGS (cm, g, s, erg, gauss). All internal computation
// uses CGS; SI is accepted only at the configuration boundary.

namespace ewjn::constants {

inline constexpr double c_light = 2.99792458e10;       // cm/s
inline constexpr double hbar = 1.0546e-27;              // erg s
inline constexpr double k_boltzmann = 1.380649e-16;     // erg/K
inline constexpr double mu_bohr = 9.2740e-21;           // erg/G

// Electrostatic conversion: sigma[s^-1] = sigma[S/m] * this.
inline constexpr double si_conductivity_to_cgs = 8.98755e9;

}  // namespace ewjn::constants
