#include "fracflow/flow.hpp"

#include "fracflow/errors.hpp"

#include <cmath>

namespace fracflow {

FlowProblem::FlowProblem(const ReservoirModel& model, std::span<const double> pressure_prev,
                         std::span<const double> saturation_prev, double dt,
                         std::span<const double> rate_scale, FlowUpwind upwind)
    : model_(&model), p_prev_(pressure_prev), s_prev_(saturation_prev), dt_(dt)
{
    if (!(dt > 0.0))
        throw Error("flow timestep must be positive");
    const auto n = static_cast<std::size_t>(model.num_cells());
    if (pressure_prev.size() != n || saturation_prev.size() != n)
        throw Error("flow state size does not match the model");

    const auto& fluid = model.fluid;
    mobility_.resize(model.connections.size());
    for (std::size_t c = 0; c < model.connections.size(); ++c) {
        const auto& conn = model.connections[c];
        const double la = fluid.total_mobility(s_prev_[conn.a]);
        const double lb = fluid.total_mobility(s_prev_[conn.b]);
        double lam = 0.5 * (la + lb);
        if (upwind == FlowUpwind::previous_potential) {
            const double dp = p_prev_[conn.a] - p_prev_[conn.b];
            if (dp > 0.0)
                lam = la;
            else if (dp < 0.0)
                lam = lb;
        }
        mobility_[c] = lam;
    }

    for (std::size_t w = 0; w < model.wells.size(); ++w) {
        const auto& well = model.wells[w];
        const double scale = w < rate_scale.size() ? rate_scale[w] : 1.0;
        double wi_sum = 0.0;
        for (double wi : well.well_index)
            wi_sum += wi;
        for (std::size_t k = 0; k < well.cells.size(); ++k) {
            Perforation perf{static_cast<int>(w), well.cells[k], 0.0, 0.0, 0.0};
            if (well.control == WellControl::rate) {
                const double sign = well.kind == WellKind::injector ? 1.0 : -1.0;
                perf.fixed_rate = sign * well.target * scale * well.well_index[k] / wi_sum;
            } else {
                const double lam = well.kind == WellKind::injector
                                       ? fluid.krw_max / fluid.mu_w
                                       : fluid.total_mobility(s_prev_[well.cells[k]]);
                perf.productivity = well.well_index[k] * lam;
                perf.bhp = well.target;
            }
            perforations_.push_back(perf);
        }
    }
}

double FlowProblem::perforation_rate(const Perforation& perf, double p) const
{
    return perf.fixed_rate + perf.productivity * (perf.bhp - p);
}

Linearization FlowProblem::linearize(const Vector& p) const
{
    const auto& model = *model_;
    const auto& fluid = model.fluid;
    const int n = model.num_cells();

    Linearization lin;
    lin.residual = Vector::Zero(n);
    MatrixBuilder jac(n, static_cast<std::size_t>(n) + 4 * model.connections.size());

    for (int i = 0; i < n; ++i) {
        const double sw = s_prev_[i];
        const auto b = fluid.shrinkage(p_prev_[i], p[i]);
        const double pv_dt = model.pore_volume[i] / dt_;
        lin.residual[i] = pv_dt * (1.0 - sw * b.water - (1.0 - sw) * b.oil);
        jac.add(i, i, pv_dt * (sw * fluid.c_w * b.water + (1.0 - sw) * fluid.c_o * b.oil));
    }
    for (std::size_t c = 0; c < model.connections.size(); ++c) {
        const auto& conn = model.connections[c];
        const double t = conn.trans * mobility_[c];
        const double flux = t * (p[conn.a] - p[conn.b]);
        lin.residual[conn.a] += flux;
        lin.residual[conn.b] -= flux;
        jac.add(conn.a, conn.a, t);
        jac.add(conn.a, conn.b, -t);
        jac.add(conn.b, conn.a, -t);
        jac.add(conn.b, conn.b, t);
    }
    for (const auto& perf : perforations_) {
        lin.residual[perf.cell] -= perforation_rate(perf, p[perf.cell]);
        jac.add(perf.cell, perf.cell, perf.productivity);
    }
    lin.jacobian = jac.build();
    return lin;
}

double FlowProblem::residual_norm(const Vector& r) const
{
    double norm = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i)
        norm = std::max(norm, std::abs(r[i]) * dt_ / model_->pore_volume[i]);
    return norm;
}

FlowState FlowProblem::evaluate(const Vector& p) const
{
    const auto& model = *model_;
    FlowState state;
    state.pressure.assign(p.data(), p.data() + p.size());
    state.total_flux.resize(model.connections.size());
    for (std::size_t c = 0; c < model.connections.size(); ++c) {
        const auto& conn = model.connections[c];
        state.total_flux[c] = conn.trans * mobility_[c] * (p[conn.a] - p[conn.b]);
    }
    for (const auto& perf : perforations_)
        state.perforations.push_back({perf.well, perf.cell, perforation_rate(perf, p[perf.cell])});
    return state;
}

Linearization assemble_flow_residual(const FlowProblem& problem, const Vector& p)
{
    return problem.linearize(p);
}

FlowResult solve_flow(const FlowProblem& problem, const Vector& p0, const NewtonControls& controls,
                      LinearSolver& linear)
{
    Vector p = p0;
    FlowResult result;
    result.report = newton_iterate(problem, p, controls, linear);
    result.state = problem.evaluate(p);
    return result;
}

} // namespace fracflow
