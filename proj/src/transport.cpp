#include "fracflow/transport.hpp"

#include "fracflow/errors.hpp"

#include <cmath>

namespace fracflow {

Linearization TransportSystem::linearize(const Vector& s) const
{
    const int n = size();
    Linearization lin;
    lin.residual.resize(n);
    MatrixBuilder jac(n, static_cast<std::size_t>(n) + 4 * connections.size() + sources.size());

    std::vector<FractionalFlow> ff(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        ff[i] = fluid.fractional_flow(s[i]);

    for (int i = 0; i < n; ++i) {
        const double pv_dt = pore_volume[i] / dt;
        lin.residual[i] = pv_dt * (s[i] - shrinkage[i] * s_prev[i]);
        jac.add(i, i, pv_dt);
    }
    for (const auto& c : connections) {
        // Both directions enter the pattern so that it never changes.
        const int up = c.flux >= 0.0 ? c.a : c.b;
        const double water = ff[up].fw * c.flux;
        const double dwater = ff[up].dfw * c.flux;
        lin.residual[c.a] += water;
        lin.residual[c.b] -= water;
        jac.add(c.a, up, dwater);
        jac.add(c.b, up, -dwater);
        const int down = up == c.a ? c.b : c.a;
        jac.add(c.a, down, 0.0);
        jac.add(c.b, down, 0.0);
    }
    for (const auto& src : sources) {
        if (src.rate >= 0.0) {
            lin.residual[src.cell] -= src.rate * src.inflow_water_fraction;
        } else {
            lin.residual[src.cell] -= src.rate * ff[src.cell].fw;
            jac.add(src.cell, src.cell, -src.rate * ff[src.cell].dfw);
        }
    }
    lin.jacobian = jac.build();
    return lin;
}

Vector TransportSystem::residual(const Vector& s) const
{
    const int n = size();
    Vector r(n);
    for (int i = 0; i < n; ++i)
        r[i] = pore_volume[i] / dt * (s[i] - shrinkage[i] * s_prev[i]);
    for (const auto& c : connections) {
        const int up = c.flux >= 0.0 ? c.a : c.b;
        const double water = fluid.fractional_flow(s[up]).fw * c.flux;
        r[c.a] += water;
        r[c.b] -= water;
    }
    for (const auto& src : sources)
        r[src.cell] -= src.rate >= 0.0 ? src.rate * src.inflow_water_fraction
                                       : src.rate * fluid.fractional_flow(s[src.cell]).fw;
    return r;
}

double TransportSystem::residual_norm(const Vector& r) const
{
    double norm = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i)
        norm = std::max(norm, std::abs(r[i]) * dt / pore_volume[i]);
    return norm;
}

std::vector<double> TransportSystem::water_flux(const Vector& s) const
{
    std::vector<double> out(connections.size());
    for (std::size_t k = 0; k < connections.size(); ++k) {
        const auto& c = connections[k];
        const int up = c.flux >= 0.0 ? c.a : c.b;
        out[k] = fluid.fractional_flow(s[up]).fw * c.flux;
    }
    return out;
}

std::pair<double, double> TransportSystem::source_water_rates(const Vector& s) const
{
    double in = 0.0;
    double out = 0.0;
    for (const auto& src : sources) {
        if (src.rate >= 0.0)
            in += src.rate * src.inflow_water_fraction;
        else
            out -= src.rate * fluid.fractional_flow(s[src.cell]).fw;
    }
    return {in, out};
}

TransportSystem make_transport_system(const ReservoirModel& model, const FlowState& flow,
                                      std::span<const double> pressure_prev,
                                      std::span<const double> saturation_prev, double dt)
{
    const int n = model.num_cells();
    if (static_cast<int>(saturation_prev.size()) != n || static_cast<int>(pressure_prev.size()) != n ||
        static_cast<int>(flow.pressure.size()) != n ||
        flow.total_flux.size() != model.connections.size())
        throw Error("transport inputs do not match the model size");

    TransportSystem sys;
    sys.fluid = model.fluid;
    sys.dt = dt;
    sys.num_matrix = model.num_matrix();
    sys.pore_volume = model.pore_volume;
    sys.s_prev.assign(saturation_prev.begin(), saturation_prev.end());
    sys.shrinkage.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        sys.shrinkage[i] = model.fluid.shrinkage(pressure_prev[i], flow.pressure[i]).water;

    sys.connections.reserve(model.connections.size());
    for (std::size_t c = 0; c < model.connections.size(); ++c) {
        const auto& conn = model.connections[c];
        sys.connections.push_back({conn.a, conn.b, flow.total_flux[c], conn.kind});
    }
    for (const auto& perf : flow.perforations) {
        const auto& well = model.wells[perf.well];
        double fraction = 1.0;
        if (well.kind == WellKind::producer && perf.rate > 0.0)
            fraction = model.fluid.fractional_flow(saturation_prev[perf.cell]).fw;
        sys.sources.push_back({perf.cell, perf.rate, fraction});
    }
    return sys;
}

Linearization assemble_transport_residual(const TransportSystem& system, const Vector& s)
{
    return system.linearize(s);
}

NewtonControls transport_controls(double tolerance, int max_iterations, double max_saturation_change)
{
    NewtonControls c;
    c.tolerance = tolerance;
    c.max_iterations = max_iterations;
    c.max_update = max_saturation_change;
    c.project_unit_interval = true;
    return c;
}

TransportSolution newton_solve(const TransportSystem& system, const Vector& s0,
                               const NewtonControls& controls, LinearSolver& linear)
{
    TransportSolution sol{s0, {}};
    sol.report = newton_iterate(system, sol.saturation, controls, linear);
    return sol;
}

} // namespace fracflow
