#pragma once

#include "fracflow/errors.hpp"
#include "fracflow/flow.hpp"
#include "fracflow/linear_solver.hpp"
#include "fracflow/model.hpp"
#include "fracflow/nepc.hpp"
#include "fracflow/units.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fracflow {

enum class SolverKind { newton, en_ne };

const char* to_string(SolverKind kind);
SolverKind parse_solver_kind(const std::string& name);

struct SolverConfig {
    int max_newton = 25;
    int max_cuts = 6;
    double tolerance = 1e-6;
    double flow_tolerance = 1e-6;
    double max_saturation_change = 0.2;
    double dt_target = 30.0 * units::day;
    double dt_initial = 1.0 * units::day;
    double ramp_factor = 2.0;
    double cut_factor = 0.5;
    ActivationConfig activation;
    SolverKind solver_kind = SolverKind::newton;
    LinearSolverKind linear_solver = LinearSolverKind::direct;
    FlowUpwind flow_upwind = FlowUpwind::previous_potential;

    void validate() const;
};

/// Rate-controlled well targets are multiplied by `factor` from `time` on.
struct RateChange {
    double time;
    double factor;
};

struct Schedule {
    double total_time = 5.0 * units::year;
    std::vector<RateChange> rate_changes;
    /// Fractions of total_time at which saturation snapshots are kept.
    std::vector<double> snapshot_fractions{0.15, 0.5, 1.0};
};

struct SimState {
    double time = 0.0;
    std::vector<double> pressure;
    std::vector<double> saturation;
};

struct SimulationCase {
    std::string name;
    ReservoirModel model;
    Schedule schedule;
    SimState initial;
};

/// One control step (report step). Iteration counts sum over its accepted
/// substeps; `wasted` sums transport iterations of attempts that were cut.
struct StepReport {
    int step = 0;
    double dt = 0.0;
    double time = 0.0; ///< end of step
    int flow_iterations = 0;
    int transport_iterations = 0;
    int wasted_iterations = 0;
    int cuts = 0;
    int substeps = 0;
    bool activated = false;
    int activations = 0;
    int local_iterations = 0;
    double criterion_score = 0.0;
    double wall_seconds = 0.0;
    double water_injected = 0.0;   ///< m^3 over the step
    double water_produced = 0.0;   ///< m^3 over the step
    double water_balance_error = 0.0; ///< |storage change - (in - out)|, m^3
    double min_saturation = 0.0;
    double max_saturation = 0.0;
};

struct Snapshot {
    double fraction;
    SimState state;
};

struct SimulationResult {
    std::vector<StepReport> steps;
    SimState final_state;
    std::vector<Snapshot> snapshots;
};

class SimulationError : public Error {
public:
    SimulationError(const std::string& what, SimulationResult partial)
        : Error(what), partial_(std::move(partial)) {}
    const SimulationResult& partial() const noexcept { return partial_; }

private:
    SimulationResult partial_;
};

/// Next control-step size: min(dt_target, last_dt * ramp_factor).
double ramp_schedule(double last_dt, const SolverConfig& config);

/// Control-step sizes covering [0, total_time]; steps are clipped so that
/// rate changes fall on step boundaries and the last step ends on total_time.
std::vector<double> control_steps(const Schedule& schedule, const SolverConfig& config);

using StepObserver = std::function<void(const StepReport&, const SimState&)>;

/// Sequential implicit loop: per attempt solve flow, build transport with the
/// new total fluxes, solve it with the configured solver; on failure cut dt by
/// cut_factor (at most max_cuts times per control step) and retry.
SimulationResult run_simulation(const SimulationCase& sim_case, const SolverConfig& config,
                                const StepObserver& observer = {});

SimState initial_state(const ReservoirModel& model, double pressure, double saturation);

} // namespace fracflow
