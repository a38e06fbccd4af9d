#include "fracflow/units.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <string>
#include <utility>

namespace fracflow::units {

namespace {

struct UnitEntry {
    std::string_view symbol;
    Dimension dimension;
    double factor;
};

constexpr std::array unit_table{
    UnitEntry{"m", Dimension::length, meter},
    UnitEntry{"cm", Dimension::length, 0.01},
    UnitEntry{"mm", Dimension::length, 0.001},
    UnitEntry{"ft", Dimension::length, foot},
    UnitEntry{"m2", Dimension::area, 1.0},
    UnitEntry{"m3", Dimension::volume, 1.0},
    UnitEntry{"s", Dimension::time, second},
    UnitEntry{"min", Dimension::time, minute},
    UnitEntry{"hour", Dimension::time, hour},
    UnitEntry{"day", Dimension::time, day},
    UnitEntry{"days", Dimension::time, day},
    UnitEntry{"d", Dimension::time, day},
    UnitEntry{"year", Dimension::time, year},
    UnitEntry{"years", Dimension::time, year},
    UnitEntry{"y", Dimension::time, year},
    UnitEntry{"Pa", Dimension::pressure, pascal},
    UnitEntry{"kPa", Dimension::pressure, 1.0e3},
    UnitEntry{"MPa", Dimension::pressure, 1.0e6},
    UnitEntry{"bar", Dimension::pressure, bar},
    UnitEntry{"psi", Dimension::pressure, psi},
    UnitEntry{"D", Dimension::permeability, darcy},
    UnitEntry{"darcy", Dimension::permeability, darcy},
    UnitEntry{"mD", Dimension::permeability, milli_darcy},
    UnitEntry{"md", Dimension::permeability, milli_darcy},
    UnitEntry{"m2", Dimension::permeability, 1.0},
    UnitEntry{"Pa*s", Dimension::viscosity, 1.0},
    UnitEntry{"Pa.s", Dimension::viscosity, 1.0},
    UnitEntry{"cP", Dimension::viscosity, centi_poise},
    UnitEntry{"cp", Dimension::viscosity, centi_poise},
    UnitEntry{"1/Pa", Dimension::compressibility, 1.0},
    UnitEntry{"1/bar", Dimension::compressibility, 1.0 / bar},
    UnitEntry{"1/psi", Dimension::compressibility, 1.0 / psi},
    UnitEntry{"kg/m3", Dimension::density, 1.0},
    UnitEntry{"m3/s", Dimension::rate, 1.0},
    UnitEntry{"m3/day", Dimension::rate, 1.0 / day},
    UnitEntry{"m3/d", Dimension::rate, 1.0 / day},
};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace

const char* to_string(Dimension d)
{
    switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::length: return "length";
    case Dimension::area: return "area";
    case Dimension::volume: return "volume";
    case Dimension::time: return "time";
    case Dimension::pressure: return "pressure";
    case Dimension::permeability: return "permeability";
    case Dimension::viscosity: return "viscosity";
    case Dimension::compressibility: return "compressibility";
    case Dimension::density: return "density";
    case Dimension::rate: return "rate";
    }
    return "unknown";
}

double unit_factor(std::string_view unit, Dimension expected)
{
    for (const auto& entry : unit_table)
        if (entry.symbol == unit && entry.dimension == expected)
            return entry.factor;
    for (const auto& entry : unit_table)
        if (entry.symbol == unit)
            throw std::invalid_argument("unit '" + std::string(unit) + "' is a " +
                                        to_string(entry.dimension) + ", expected " +
                                        to_string(expected));
    throw std::invalid_argument("unknown unit '" + std::string(unit) + "'");
}

double parse_quantity(std::string_view text, Dimension expected)
{
    text = trim(text);
    const auto split = text.find_first_of(" \t");
    const std::string_view number = split == std::string_view::npos ? text : text.substr(0, split);
    const std::string_view unit =
        split == std::string_view::npos ? std::string_view{} : trim(text.substr(split));

    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc{} || ptr != number.data() + number.size() || number.empty())
        throw std::invalid_argument("malformed number '" + std::string(number) + "'");

    if (unit.empty())
        return value;
    if (expected == Dimension::dimensionless)
        throw std::invalid_argument("unexpected unit '" + std::string(unit) +
                                    "' on a dimensionless value");
    return value * unit_factor(unit, expected);
}

} // namespace fracflow::units
