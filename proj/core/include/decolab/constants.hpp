#pragma once

#include <numbers>

namespace decolab {

struct PhysicalConstants {
    static constexpr double pi = std::numbers::pi;
    // NV electron spin, 28 GHz/T expressed as an angular rate.
    static constexpr double gamma_nv = 2.0 * pi * 28.0e9;
    // Free-electron value (CODATA 2018), rad s^-1 T^-1.
    static constexpr double gamma_e = 1.76085963023e11;
    // 13C nucleus, rad s^-1 T^-1.
    static constexpr double gamma_c = 6.728284e7;
    static constexpr double mu0_over_4pi = 1.0e-7;
    static constexpr double hbar = 1.054571817e-34;
    // Atomic number density of diamond, m^-3.
    static constexpr double n_d = 1.76e29;
    static constexpr double kB = 1.380649e-23;
    static constexpr double gas_constant = 8.314462618;
};

namespace units {
inline constexpr double milligauss = 1.0e-7;  // tesla
inline constexpr double ms = 1.0e-3;
inline constexpr double us = 1.0e-6;
inline constexpr double ppb = 1.0e-9;
inline constexpr double torr = 101325.0 / 760.0;  // pascal
inline constexpr double atm = 101325.0;           // pascal
// mol/s per sccm at 0 degC and 1 atm.
inline constexpr double sccm_per_mol_s = 1.345e6;
}  // namespace units

}  // namespace decolab
