#include "fracflow/sim.hpp"

#include "fracflow/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace fracflow {

const char* to_string(SolverKind kind)
{
    return kind == SolverKind::newton ? "newton" : "enne";
}

SolverKind parse_solver_kind(const std::string& name)
{
    if (name == "newton")
        return SolverKind::newton;
    if (name == "enne" || name == "en_ne" || name == "en-ne")
        return SolverKind::en_ne;
    throw ConfigError("solver.kind", "expected 'newton' or 'enne', got '" + name + "'");
}

void SolverConfig::validate() const
{
    if (max_newton < 1)
        throw ConfigError("solver.max_newton", "must be >= 1");
    if (max_cuts < 0)
        throw ConfigError("solver.max_cuts", "must be >= 0");
    if (!(tolerance >= 0.0) || !(flow_tolerance >= 0.0))
        throw ConfigError("solver.tolerance", "must be non-negative");
    if (!(max_saturation_change > 0.0))
        throw ConfigError("solver.max_ds", "must be positive");
    if (!(dt_initial > 0.0 && dt_initial <= dt_target))
        throw ConfigError("schedule.dt_initial", "must satisfy 0 < dt_initial <= dt_target");
    if (!(ramp_factor > 1.0))
        throw ConfigError("schedule.ramp_factor", "must be > 1");
    if (!(cut_factor > 0.0 && cut_factor < 1.0))
        throw ConfigError("schedule.cut_factor", "must lie in (0, 1)");
    activation.validate();
}

double ramp_schedule(double last_dt, const SolverConfig& config)
{
    return std::min(config.dt_target, last_dt * config.ramp_factor);
}

std::vector<double> control_steps(const Schedule& schedule, const SolverConfig& config)
{
    const double total = schedule.total_time;
    if (!(total > 0.0))
        throw ConfigError("schedule.total_time", "must be positive");

    std::vector<double> breaks;
    for (const auto& rc : schedule.rate_changes)
        if (rc.time > 0.0 && rc.time < total)
            breaks.push_back(rc.time);
    std::sort(breaks.begin(), breaks.end());

    const double eps = 1e-9 * total;
    std::vector<double> steps;
    double t = 0.0;
    double dt = config.dt_initial;
    while (total - t > eps) {
        double step = std::min(dt, total - t);
        for (double b : breaks)
            if (b > t + eps) {
                step = std::min(step, b - t);
                break;
            }
        steps.push_back(step);
        t += step;
        dt = ramp_schedule(dt, config);
    }
    // Land exactly on the end time.
    double head = 0.0;
    for (std::size_t k = 0; k + 1 < steps.size(); ++k)
        head += steps[k];
    steps.back() = total - head;
    return steps;
}

SimState initial_state(const ReservoirModel& model, double pressure, double saturation)
{
    const auto n = static_cast<std::size_t>(model.num_cells());
    return {0.0, std::vector<double>(n, pressure), std::vector<double>(n, saturation)};
}

namespace {

std::vector<double> rate_scale_at(const SimulationCase& sim_case, double time, double dt)
{
    double factor = 1.0;
    for (const auto& rc : sim_case.schedule.rate_changes)
        if (time + 1e-9 * dt >= rc.time)
            factor *= rc.factor;
    std::vector<double> scale(sim_case.model.wells.size(), 1.0);
    for (std::size_t w = 0; w < scale.size(); ++w)
        if (sim_case.model.wells[w].control == WellControl::rate)
            scale[w] = factor;
    return scale;
}

Vector to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

SimulationResult run_simulation(const SimulationCase& sim_case, const SolverConfig& config,
                                const StepObserver& observer)
{
    config.validate();
    const ReservoirModel& model = sim_case.model;
    const auto n = static_cast<std::size_t>(model.num_cells());
    if (sim_case.initial.pressure.size() != n || sim_case.initial.saturation.size() != n)
        throw Error("initial state does not match the model size");

    const std::vector<double> steps = control_steps(sim_case.schedule, config);
    const double total = sim_case.schedule.total_time;

    auto flow_linear = make_linear_solver(config.linear_solver, true);
    auto transport_linear = make_linear_solver(config.linear_solver);
    auto local_linear = make_linear_solver(LinearSolverKind::direct);

    NewtonControls flow_controls;
    flow_controls.tolerance = config.flow_tolerance;
    flow_controls.max_iterations = config.max_newton;
    const NewtonControls controls =
        transport_controls(config.tolerance, config.max_newton, config.max_saturation_change);

    SimulationResult result;
    SimState state = sim_case.initial;
    state.time = 0.0;
    FluxHistory history;

    std::vector<double> fractions = sim_case.schedule.snapshot_fractions;
    std::sort(fractions.begin(), fractions.end());
    std::size_t next_snapshot = 0;
    while (next_snapshot < fractions.size() && fractions[next_snapshot] <= 0.0)
        result.snapshots.push_back({fractions[next_snapshot++], state});

    double step_end = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto started = std::chrono::steady_clock::now();
        const double dt_control = steps[k];
        const double step_begin = step_end;
        step_end = k + 1 == steps.size() ? total : step_begin + dt_control;

        StepReport report;
        report.step = static_cast<int>(k) + 1;
        report.dt = dt_control;

        double done = 0.0;
        double dt = dt_control;
        bool after_cut = false;
        while (dt_control - done > 1e-12 * dt_control) {
            dt = std::min(dt, dt_control - done);
            const auto scale = rate_scale_at(sim_case, state.time, dt);
            const FlowProblem flow_problem(model, state.pressure, state.saturation, dt, scale,
                                           config.flow_upwind);
            FlowResult flow =
                solve_flow(flow_problem, to_vector(state.pressure), flow_controls, *flow_linear);

            bool accepted = flow.report.converged;
            TransportSolution transport;
            TransportSystem system;
            if (accepted) {
                system = make_transport_system(model, flow.state, state.pressure, state.saturation, dt);
                const Vector s0 = to_vector(state.saturation);
                if (config.solver_kind == SolverKind::newton) {
                    transport = newton_solve(system, s0, controls, *transport_linear);
                } else {
                    transport = en_ne_solve(system, s0, history, after_cut, controls,
                                            config.activation, *transport_linear, *local_linear);
                    report.criterion_score =
                        std::max(report.criterion_score, transport.report.criterion_score);
                    if (transport.report.activated) {
                        report.activated = true;
                        ++report.activations;
                        report.local_iterations += transport.report.local_iterations;
                    }
                }
                accepted = transport.report.converged;
            }

            if (!accepted) {
                report.wasted_iterations += transport.report.iterations;
                if (report.cuts >= config.max_cuts) {
                    report.time = state.time;
                    report.wall_seconds =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
                    result.steps.push_back(report);
                    result.final_state = state;
                    throw SimulationError("step " + std::to_string(report.step) + " failed after " +
                                              std::to_string(report.cuts) + " timestep cuts",
                                          std::move(result));
                }
                ++report.cuts;
                dt *= config.cut_factor;
                after_cut = true;
                // Differences must not straddle a cut.
                history.clear();
                continue;
            }

            const Vector& s = transport.saturation;
            double storage = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                storage += system.pore_volume[i] * (s[i] - system.shrinkage[i] * system.s_prev[i]);
            const auto [rate_in, rate_out] = system.source_water_rates(s);
            report.water_injected += rate_in * dt;
            report.water_produced += rate_out * dt;
            report.water_balance_error += std::abs(storage - (rate_in - rate_out) * dt);

            report.flow_iterations += flow.report.iterations;
            report.transport_iterations += transport.report.iterations;
            ++report.substeps;

            history.record(matrix_fracture_water_flux(system, s));
            state.pressure = std::move(flow.state.pressure);
            state.saturation.assign(s.data(), s.data() + s.size());
            done += dt;
            state.time = step_begin + done;
            // After a cut, growth resumes from the reduced step.
            dt = ramp_schedule(dt, config);
        }
        state.time = step_end;

        report.time = state.time;
        const auto [lo, hi] = std::minmax_element(state.saturation.begin(), state.saturation.end());
        report.min_saturation = *lo;
        report.max_saturation = *hi;
        report.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.steps.push_back(report);
        if (observer)
            observer(report, state);

        while (next_snapshot < fractions.size() &&
               state.time >= fractions[next_snapshot] * total - 1e-9 * total)
            result.snapshots.push_back({fractions[next_snapshot++], state});
    }
    result.final_state = std::move(state);
    return result;
}

} // namespace fracflow
