// units.hpp: unit tags and CODATA conversion factors (internal units: eV, fs)

#pragma once

#include <numbers>
#include <string_view>

namespace qgs {

inline constexpr double kHbarEvFs = 0.6582119569;        // eV * fs
inline constexpr double kEvPerWavenumber = 1.239841984e-4; // eV per cm^-1
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Unit {
    ElectronVolt,
    Wavenumber, // cm^-1
    FsPeriod,   // oscillation period 2*pi*hbar/E
    FsInverse,  // inverse time, E = hbar/t  (e.g. "sigma^-1 = 400 fs")
};

// Accepts "ev", "cm1", "cm-1", "fs-period", "fs-inverse" (case-insensitive).
Unit parse_unit(std::string_view tag);
std::string_view unit_name(Unit unit);

double convert_units(double value, Unit from, Unit to);

inline double wavenumber_to_ev(double cm1) { return cm1 * kEvPerWavenumber; }
inline double ev_to_wavenumber(double ev) { return ev / kEvPerWavenumber; }
// hbar / t : energy whose inverse angular frequency is t
inline double inverse_fs_to_ev(double t_fs) { return kHbarEvFs / t_fs; }

} // namespace qgs
