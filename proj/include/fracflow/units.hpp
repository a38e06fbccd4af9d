#pragma once

#include <string_view>

namespace fracflow::units {

inline constexpr double meter = 1.0;
inline constexpr double second = 1.0;
inline constexpr double pascal = 1.0;
inline constexpr double minute = 60.0;
inline constexpr double hour = 3600.0;
inline constexpr double day = 86400.0;
inline constexpr double year = 365.0 * day;
inline constexpr double bar = 1.0e5;
inline constexpr double psi = 6894.757293168361;
inline constexpr double darcy = 9.869232667160130e-13;
inline constexpr double milli_darcy = 1.0e-3 * darcy;
inline constexpr double centi_poise = 1.0e-3;
inline constexpr double foot = 0.3048;

enum class Dimension {
    dimensionless,
    length,
    area,
    volume,
    time,
    pressure,
    permeability,
    viscosity,
    compressibility,
    density,
    rate,
};

const char* to_string(Dimension d);

/// Parses "<number> [unit]" into SI. Unit-less input is taken as already SI.
/// Throws std::invalid_argument on unknown units, dimension mismatch or a
/// malformed number.
double parse_quantity(std::string_view text, Dimension expected);

/// SI factor of a single unit symbol, e.g. "mD" -> 9.869e-16.
double unit_factor(std::string_view unit, Dimension expected);

} // namespace fracflow::units
