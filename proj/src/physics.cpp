#include "fracflow/physics.hpp"

#include "fracflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracflow {

void FluidModel::validate() const
{
    if (!(mu_w > 0.0) || !(mu_o > 0.0))
        throw ConfigError("fluid", "viscosities must be positive");
    if (!(n_w >= 1.0) || !(n_o >= 1.0))
        throw ConfigError("fluid", "Corey exponents must be >= 1");
    if (!(krw_max > 0.0 && krw_max <= 1.0) || !(kro_max > 0.0 && kro_max <= 1.0))
        throw ConfigError("fluid", "relative permeability endpoints must lie in (0, 1]");
    if (!(s_wr >= 0.0) || !(s_or >= 0.0) || !(s_wr + s_or < 1.0))
        throw ConfigError("fluid", "residual saturations must satisfy 0 <= swr + sor < 1");
    if (!(c_w >= 0.0) || !(c_o >= 0.0))
        throw ConfigError("fluid", "compressibilities must be non-negative");
}

double FluidModel::normalized_saturation(double sw) const noexcept
{
    const double s = (std::clamp(sw, 0.0, 1.0) - s_wr) / (1.0 - s_wr - s_or);
    return std::clamp(s, 0.0, 1.0);
}

RelPerm FluidModel::relperm(double sw) const noexcept
{
    const double s = normalized_saturation(sw);
    return {krw_max * std::pow(s, n_w), kro_max * std::pow(1.0 - s, n_o)};
}

double FluidModel::total_mobility(double sw) const noexcept
{
    const auto kr = relperm(sw);
    return kr.krw / mu_w + kr.kro / mu_o;
}

FractionalFlow FluidModel::fractional_flow(double sw) const noexcept
{
    const double span = 1.0 - s_wr - s_or;
    const double raw = (std::clamp(sw, 0.0, 1.0) - s_wr) / span;
    const double s = std::clamp(raw, 0.0, 1.0);

    const double lw = krw_max * std::pow(s, n_w) / mu_w;
    const double lo = kro_max * std::pow(1.0 - s, n_o) / mu_o;
    const double lt = lw + lo;
    const double fw = lw / lt;

    // Derivative is zero where the normalization or the input clamp is active.
    if (sw < 0.0 || sw > 1.0 || raw <= 0.0 || raw >= 1.0)
        return {fw, 0.0};
    const double dlw = krw_max * n_w * std::pow(s, n_w - 1.0) / mu_w / span;
    const double dlo = -kro_max * n_o * std::pow(1.0 - s, n_o - 1.0) / mu_o / span;
    return {fw, (dlw * lo - lw * dlo) / (lt * lt)};
}

PhaseDensity FluidModel::density(double p) const noexcept
{
    return {rho_w_ref * std::exp(c_w * (p - p_ref)), rho_o_ref * std::exp(c_o * (p - p_ref))};
}

PhaseDensity FluidModel::shrinkage(double p_old, double p_new) const noexcept
{
    return {std::exp(c_w * (p_old - p_new)), std::exp(c_o * (p_old - p_new))};
}

void WellSpec::validate(int num_cells) const
{
    const std::string where = "well." + name;
    if (cells.empty())
        throw ConfigError(where, "well has no perforations");
    if (cells.size() != well_index.size())
        throw ConfigError(where, "one well index per perforation required");
    for (int c : cells)
        if (c < 0 || c >= num_cells)
            throw ConfigError(where, "perforation outside the grid");
    for (double wi : well_index)
        if (!(wi > 0.0))
            throw ConfigError(where, "well index must be positive");
    if (control == WellControl::rate && !(target >= 0.0))
        throw ConfigError(where, "rate target must be non-negative");
}

double peaceman_well_index(double dx, double dy, double h, double kx, double ky, double well_radius)
{
    const double ratio_yx = std::sqrt(ky / kx);
    const double ratio_xy = std::sqrt(kx / ky);
    const double re = 0.28 * std::sqrt(ratio_yx * dx * dx + ratio_xy * dy * dy) /
                      (std::sqrt(ratio_yx) + std::sqrt(ratio_xy));
    if (re <= well_radius)
        throw InvalidGeometry("equivalent radius " + std::to_string(re) +
                              " m does not exceed the well radius");
    const double k = std::sqrt(kx * ky);
    return 2.0 * std::numbers::pi * k * h / std::log(re / well_radius);
}

} // namespace fracflow
