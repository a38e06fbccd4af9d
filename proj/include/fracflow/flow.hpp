#pragma once

#include "fracflow/linear_solver.hpp"
#include "fracflow/model.hpp"
#include "fracflow/newton.hpp"

#include <span>
#include <vector>

namespace fracflow {

/// How the frozen total mobility of a connection is upwinded.
enum class FlowUpwind {
    previous_potential, ///< by the sign of p^n_a - p^n_b, arithmetic mean on ties
    arithmetic,
};

/// One perforation's total volumetric rate (m^3/s, > 0 into the reservoir).
struct PerforationRate {
    int well;
    int cell;
    double rate;
};

struct FlowState {
    std::vector<double> pressure;   ///< per unknown (Pa)
    std::vector<double> total_flux; ///< per connection, positive a -> b (m^3/s)
    std::vector<PerforationRate> perforations;
};

/// Pressure equation of the sequential split: total volume balance with
/// mobilities frozen at the previous saturations,
///   PV/dt (1 - Sw^n bw(p) - So^n bo(p)) + sum T lam_t (p_i - p_j) - q_i = 0,
/// b = rho(p^n) / rho(p).
class FlowProblem {
public:
    FlowProblem(const ReservoirModel& model, std::span<const double> pressure_prev,
                std::span<const double> saturation_prev, double dt,
                std::span<const double> rate_scale = {},
                FlowUpwind upwind = FlowUpwind::previous_potential);

    Linearization linearize(const Vector& p) const;
    /// max_i |R_i| dt / PV_i
    double residual_norm(const Vector& r) const;

    /// Fluxes and perforation rates at the given pressures.
    FlowState evaluate(const Vector& p) const;

    int size() const noexcept { return model_->num_cells(); }
    double dt() const noexcept { return dt_; }

private:
    struct Perforation {
        int well;
        int cell;
        double fixed_rate;   ///< rate control
        double productivity; ///< WI * lambda for bhp control, zero otherwise
        double bhp;
    };

    double perforation_rate(const Perforation& perf, double p) const;

    const ReservoirModel* model_;
    std::span<const double> p_prev_;
    std::span<const double> s_prev_;
    double dt_;
    std::vector<double> mobility_; ///< per connection
    std::vector<Perforation> perforations_;
};

/// Assembles the flow residual and exact pressure Jacobian at `p`.
Linearization assemble_flow_residual(const FlowProblem& problem, const Vector& p);

struct FlowResult {
    FlowState state;
    NewtonReport report;
};

/// Newton on the pressure equation from `p0`. A non-converged report tells the
/// caller to cut the step.
FlowResult solve_flow(const FlowProblem& problem, const Vector& p0, const NewtonControls& controls,
                      LinearSolver& linear);

} // namespace fracflow
