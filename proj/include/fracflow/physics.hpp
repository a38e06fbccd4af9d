#pragma once

#include "fracflow/units.hpp"

#include <string>
#include <vector>

namespace fracflow {

struct RelPerm {
    double krw;
    double kro;
};

struct FractionalFlow {
    double fw;
    double dfw; ///< d fw / d Sw
};

struct PhaseDensity {
    double water;
    double oil;
};

/// Two-phase water/oil properties with Corey relative permeabilities.
/// Defaults are the common waterflood parameters of the packaged cases.
struct FluidModel {
    double mu_w = 1.0e-3;
    double mu_o = 5.0e-3;
    double c_w = 1.0e-13;
    double c_o = 1.0e-10;
    double rho_w_ref = 1000.0;
    double rho_o_ref = 800.0;
    double p_ref = 100.0 * units::bar;
    double n_w = 2.0;
    double n_o = 2.0;
    double krw_max = 1.0;
    double kro_max = 1.0;
    double s_wr = 0.0;
    double s_or = 0.0;

    void validate() const;

    /// Normalized saturation clamped to [0, 1].
    double normalized_saturation(double sw) const noexcept;

    RelPerm relperm(double sw) const noexcept;
    FractionalFlow fractional_flow(double sw) const noexcept;
    double total_mobility(double sw) const noexcept;

    PhaseDensity density(double p) const noexcept;
    /// rho(p_old) / rho(p_new) per phase; 1 in the incompressible limit.
    PhaseDensity shrinkage(double p_old, double p_new) const noexcept;
};

enum class WellKind { injector, producer };
enum class WellControl { rate, bhp };

/// A well with one or more perforations. Injectors inject water only.
/// `target` is the surface-free volumetric total rate (m^3/s, >= 0 for both
/// kinds; producers withdraw it) for rate control, or the bottom-hole pressure
/// (Pa) for bhp control.
struct WellSpec {
    std::string name;
    WellKind kind = WellKind::injector;
    WellControl control = WellControl::rate;
    double target = 0.0;
    std::vector<int> cells;
    std::vector<double> well_index;

    void validate(int num_cells) const;
};

/// Peaceman well index 2 pi k h / ln(r_e / r_w) for a vertical well in a
/// Cartesian cell; anisotropic equivalent radius, reducing to
/// r_e = 0.14 sqrt(dx^2 + dy^2) for kx == ky.
double peaceman_well_index(double dx, double dy, double h, double kx, double ky,
                           double well_radius = 0.1);

} // namespace fracflow
