#pragma once

#include "fracflow/flow.hpp"
#include "fracflow/linear_solver.hpp"
#include "fracflow/model.hpp"
#include "fracflow/newton.hpp"
#include "fracflow/physics.hpp"

#include <span>
#include <vector>

namespace fracflow {

struct TransportConnection {
    int a;
    int b;
    double flux; ///< fixed total flux, positive a -> b (m^3/s)
    ConnectionKind kind;
};

/// Fixed total-rate source. rate > 0 adds water at `inflow_water_fraction`
/// of the rate; rate < 0 withdraws at the cell's fractional flow.
struct TransportSource {
    int cell;
    double rate;
    double inflow_water_fraction = 1.0;
};

/// Implicit water-saturation equations with total fluxes frozen from the
/// flow step. Unknowns are ordered matrix cells first, then fracture cells.
///
///   R_i = PV_i/dt (S_i - bw_i S^n_i) + sum_c f_w(S_upwind) F_c - q_w,i
///
/// with upwinding by the sign of the total flux.
struct TransportSystem {
    FluidModel fluid;
    double dt = 0.0;
    int num_matrix = 0;
    std::vector<double> pore_volume;
    std::vector<double> s_prev;
    std::vector<double> shrinkage; ///< rho_w(p^n) / rho_w(p), 1 if incompressible
    std::vector<TransportConnection> connections;
    std::vector<TransportSource> sources;

    int size() const noexcept { return static_cast<int>(pore_volume.size()); }

    Linearization linearize(const Vector& s) const;
    Vector residual(const Vector& s) const;
    /// max_i |R_i| dt / PV_i, in saturation units.
    double residual_norm(const Vector& r) const;

    /// Signed water flux (a -> b) on every connection at state s.
    std::vector<double> water_flux(const Vector& s) const;
    /// Water volume rates into and out of the domain through sources.
    std::pair<double, double> source_water_rates(const Vector& s) const;
};

/// Builds the transport system for one step from a converged flow state.
TransportSystem make_transport_system(const ReservoirModel& model, const FlowState& flow,
                                      std::span<const double> pressure_prev,
                                      std::span<const double> saturation_prev, double dt);

Linearization assemble_transport_residual(const TransportSystem& system, const Vector& s);

struct TransportSolution {
    Vector saturation;
    NewtonReport report;
};

NewtonControls transport_controls(double tolerance, int max_iterations, double max_saturation_change);

/// Standard Newton on the full transport system.
TransportSolution newton_solve(const TransportSystem& system, const Vector& s0,
                               const NewtonControls& controls, LinearSolver& linear);

} // namespace fracflow
