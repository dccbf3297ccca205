#pragma once

// Physical constants and unit conversions. Everything inside the library is
// in atomic units (hartree, bohr, electron mass, e*a0, a.u. of field/time).

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "dimershield/error.hpp"

namespace dimershield {

namespace codata2018 {
inline constexpr double hartree_J = 4.3597447222071e-18;
inline constexpr double bohr_m = 5.29177210903e-11;
inline constexpr double elementary_charge_C = 1.602176634e-19;
inline constexpr double hbar_Js = 1.054571817e-34;
inline constexpr double planck_Js = 6.62607015e-34;
inline constexpr double boltzmann_J_per_K = 1.380649e-23;
inline constexpr double amu_kg = 1.66053906660e-27;
inline constexpr double electron_mass_kg = 9.1093837015e-31;
inline constexpr double speed_of_light_m_per_s = 299792458.0;
}  // namespace codata2018

enum class Dimension { length, energy, dipole, field, mass, time, rate, dispersion };

enum class Unit {
    bohr,
    meter,
    angstrom,
    hartree,
    joule,
    hertz,
    kilohertz,
    megahertz,
    gigahertz,
    kelvin,
    microkelvin,
    nanokelvin,
    au_dipole,
    debye,
    au_field,
    volt_per_meter,
    kilovolt_per_cm,
    au_mass,
    amu,
    au_time,
    second,
    au_rate,
    cm3_per_s,
    hartree_bohr6,
};

namespace detail {

struct UnitInfo {
    Unit unit;
    std::string_view tag;
    Dimension dim;
    double to_au;  // multiply a value in this unit to obtain atomic units
};

inline constexpr double debye_Cm = 1e-21 / codata2018::speed_of_light_m_per_s;
inline constexpr double au_dipole_Cm = codata2018::elementary_charge_C * codata2018::bohr_m;
inline constexpr double au_field_V_per_m =
    codata2018::hartree_J / (codata2018::elementary_charge_C * codata2018::bohr_m);
inline constexpr double au_time_s = codata2018::hbar_Js / codata2018::hartree_J;
inline constexpr double hz_in_hartree = codata2018::planck_Js / codata2018::hartree_J;
inline constexpr double kelvin_in_hartree = codata2018::boltzmann_J_per_K / codata2018::hartree_J;
inline constexpr double bohr_cm = codata2018::bohr_m * 100.0;
inline constexpr double au_rate_cm3_s = bohr_cm * bohr_cm * bohr_cm / au_time_s;

inline constexpr std::array<UnitInfo, 24> table{{
    {Unit::bohr, "bohr", Dimension::length, 1.0},
    {Unit::meter, "m", Dimension::length, 1.0 / codata2018::bohr_m},
    {Unit::angstrom, "angstrom", Dimension::length, 1e-10 / codata2018::bohr_m},
    {Unit::hartree, "hartree", Dimension::energy, 1.0},
    {Unit::joule, "J", Dimension::energy, 1.0 / codata2018::hartree_J},
    {Unit::hertz, "Hz", Dimension::energy, hz_in_hartree},
    {Unit::kilohertz, "kHz", Dimension::energy, 1e3 * hz_in_hartree},
    {Unit::megahertz, "MHz", Dimension::energy, 1e6 * hz_in_hartree},
    {Unit::gigahertz, "GHz", Dimension::energy, 1e9 * hz_in_hartree},
    {Unit::kelvin, "K", Dimension::energy, kelvin_in_hartree},
    {Unit::microkelvin, "uK", Dimension::energy, 1e-6 * kelvin_in_hartree},
    {Unit::nanokelvin, "nK", Dimension::energy, 1e-9 * kelvin_in_hartree},
    {Unit::au_dipole, "ea0", Dimension::dipole, 1.0},
    {Unit::debye, "D", Dimension::dipole, debye_Cm / au_dipole_Cm},
    {Unit::au_field, "au_field", Dimension::field, 1.0},
    {Unit::volt_per_meter, "V/m", Dimension::field, 1.0 / au_field_V_per_m},
    {Unit::kilovolt_per_cm, "kV/cm", Dimension::field, 1e5 / au_field_V_per_m},
    {Unit::au_mass, "me", Dimension::mass, 1.0},
    {Unit::amu, "u", Dimension::mass, codata2018::amu_kg / codata2018::electron_mass_kg},
    {Unit::au_time, "au_time", Dimension::time, 1.0},
    {Unit::second, "s", Dimension::time, 1.0 / au_time_s},
    {Unit::au_rate, "bohr3/au_time", Dimension::rate, 1.0},
    {Unit::cm3_per_s, "cm3/s", Dimension::rate, 1.0 / au_rate_cm3_s},
    {Unit::hartree_bohr6, "Eh*a0^6", Dimension::dispersion, 1.0},
}};

inline constexpr const UnitInfo& info(Unit u) {
    for (const auto& e : table)
        if (e.unit == u) return e;
    return table[0];
}

}  // namespace detail

inline std::string_view unit_tag(Unit u) { return detail::info(u).tag; }

inline Dimension unit_dimension(Unit u) { return detail::info(u).dim; }

inline Unit parse_unit(std::string_view tag) {
    for (const auto& e : detail::table)
        if (e.tag == tag) return e.unit;
    throw UnitError("unknown unit tag '" + std::string(tag) + "'");
}

inline double to_au(double value, Unit from) { return value * detail::info(from).to_au; }

inline double from_au(double value, Unit to) { return value / detail::info(to).to_au; }

inline double convert(double value, Unit from, Unit to) {
    const auto& a = detail::info(from);
    const auto& b = detail::info(to);
    if (a.dim != b.dim)
        throw UnitError("cannot convert " + std::string(a.tag) + " to " + std::string(b.tag));
    if (from == to) return value;
    return value * (a.to_au / b.to_au);
}

// Shorthands used throughout.
namespace units {
inline double kV_cm(double v) { return to_au(v, Unit::kilovolt_per_cm); }
inline double debye(double v) { return to_au(v, Unit::debye); }
inline double GHz(double v) { return to_au(v, Unit::gigahertz); }
inline double MHz(double v) { return to_au(v, Unit::megahertz); }
inline double kHz(double v) { return to_au(v, Unit::kilohertz); }
inline double Hz(double v) { return to_au(v, Unit::hertz); }
inline double nK(double v) { return to_au(v, Unit::nanokelvin); }
inline double amu(double v) { return to_au(v, Unit::amu); }
inline double as_kHz(double e) { return from_au(e, Unit::kilohertz); }
inline double as_MHz(double e) { return from_au(e, Unit::megahertz); }
inline double as_debye(double d) { return from_au(d, Unit::debye); }
inline double as_kV_cm(double f) { return from_au(f, Unit::kilovolt_per_cm); }
inline double as_nK(double e) { return from_au(e, Unit::nanokelvin); }
inline double as_kelvin(double e) { return from_au(e, Unit::kelvin); }
inline double as_cm3_s(double k) { return from_au(k, Unit::cm3_per_s); }
}  // namespace units

}  // namespace dimershield
