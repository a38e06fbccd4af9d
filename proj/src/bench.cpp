#include "fracflow/bench.hpp"

#include "fracflow/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace fracflow {

namespace {

std::string snapshot_tag(double fraction)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03d", static_cast<int>(fraction * 100.0 + 0.5));
    return buf;
}

std::string summary_row(const ArmResult& a, bool include_timing)
{
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.6f", include_timing ? a.wall_seconds : 0.0);
    std::ostringstream o;
    o << to_string(a.kind) << ',' << a.steps.size() << ',' << a.total_iterations << ','
      << a.transport_iterations << ',' << a.wasted_iterations << ',' << a.flow_iterations << ','
      << a.cuts << ',' << a.activations << ',' << wall << ',' << (a.failed ? "failed" : "ok")
      << '\n';
    return o.str();
}

constexpr const char* summary_header =
    "solver,steps,total_iters,transport_iters,wasted,flow_iters,cuts,activations,wall_s,status\n";

ChartSeries series_of(const ArmResult& a, const char* color, bool cumulative, bool time_axis)
{
    ChartSeries s{to_string(a.kind) == std::string("newton") ? "Newton" : "EN-NE", color, {}, {}, {}};
    double acc = 0.0;
    for (const auto& st : a.steps) {
        s.x.push_back(st.time / units::day);
        if (time_axis)
            acc += st.wall_seconds;
        else if (cumulative)
            acc += st.transport_iterations + st.wasted_iterations;
        else
            acc = st.transport_iterations + st.wasted_iterations;
        s.y.push_back(acc);
        s.flags.push_back(st.activated);
    }
    return s;
}

} // namespace

void summarize(ArmResult& arm)
{
    arm.transport_iterations = arm.wasted_iterations = arm.total_iterations = 0;
    arm.flow_iterations = arm.cuts = arm.activations = 0;
    arm.wall_seconds = 0.0;
    for (const auto& s : arm.steps) {
        arm.transport_iterations += s.transport_iterations;
        arm.wasted_iterations += s.wasted_iterations;
        arm.flow_iterations += s.flow_iterations;
        arm.cuts += s.cuts;
        arm.activations += s.activated ? 1 : 0;
        arm.wall_seconds += s.wall_seconds;
    }
    arm.total_iterations = arm.transport_iterations + arm.wasted_iterations;
}

ArmResult run_arm(const SimulationCase& sim_case, const SolverConfig& config)
{
    ArmResult arm;
    arm.kind = config.solver_kind;
    try {
        auto result = run_simulation(sim_case, config);
        arm.steps = std::move(result.steps);
        arm.final_state = std::move(result.final_state);
        arm.snapshots = std::move(result.snapshots);
    } catch (const SimulationError& e) {
        arm.failed = true;
        arm.error = e.what();
        arm.steps = e.partial().steps;
        arm.final_state = e.partial().final_state;
        arm.snapshots = e.partial().snapshots;
    }
    summarize(arm);
    return arm;
}

int thread_cap(int fallback)
{
    if (const char* env = std::getenv("FRACFLOW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            return static_cast<int>(v);
    }
    return fallback;
}

BenchmarkResult run_benchmark(const SimulationCase& sim_case, const SolverConfig& base,
                              const BenchmarkOptions& options)
{
    SolverConfig newton = base;
    newton.solver_kind = SolverKind::newton;
    SolverConfig enne = base;
    enne.solver_kind = SolverKind::en_ne;

    BenchmarkResult result;
    if (thread_cap(options.max_threads) >= 2) {
        std::exception_ptr failure;
        std::thread worker([&] {
            try {
                result.en_ne = run_arm(sim_case, enne);
            } catch (...) {
                failure = std::current_exception();
            }
        });
        try {
            result.newton = run_arm(sim_case, newton);
        } catch (...) {
            worker.join();
            throw;
        }
        worker.join();
        if (failure)
            std::rethrow_exception(failure);
    } else {
        result.newton = run_arm(sim_case, newton);
        result.en_ne = run_arm(sim_case, enne);
    }
    return result;
}

void write_arm_outputs(const ArmResult& arm, const SimulationCase& sim_case,
                       const std::filesystem::path& dir, const OutputOptions& options)
{
    const std::string prefix = to_string(arm.kind);
    {
        std::ostringstream o;
        write_steps_csv(o, arm.steps, options.include_timing);
        write_text_file(dir / (prefix + "_steps.csv"), o.str());
    }
    {
        std::ostringstream o;
        write_cumulative_csv(o, arm.steps, options.include_timing);
        write_text_file(dir / (prefix + "_cumulative.csv"), o.str());
    }
    if (!options.write_vtk)
        return;
    for (const auto& snap : arm.snapshots) {
        const auto tag = snapshot_tag(snap.fraction);
        write_vtk_snapshot(snap.state, sim_case.model, dir / (prefix + "_t" + tag + ".vtk"));
        write_vtk_fractures(snap.state, sim_case.model, dir / (prefix + "_t" + tag + "_fractures.vtk"));
    }
}

void write_benchmark_outputs(const BenchmarkResult& result, const SimulationCase& sim_case,
                             const std::filesystem::path& dir, const OutputOptions& options)
{
    write_arm_outputs(result.newton, sim_case, dir, options);
    write_arm_outputs(result.en_ne, sim_case, dir, options);

    write_text_file(dir / "summary.csv", std::string(summary_header) +
                                             summary_row(result.newton, options.include_timing) +
                                             summary_row(result.en_ne, options.include_timing));

    const auto chart = [&](const std::string& title, const std::string& ylabel, bool cumulative,
                           bool time_axis) {
        ChartSpec spec{sim_case.name + ": " + title, "time (days)", ylabel, {}};
        spec.series.push_back(series_of(result.newton, "#1f77b4", cumulative, time_axis));
        spec.series.push_back(series_of(result.en_ne, "#d62728", cumulative, time_axis));
        spec.series[0].flags.clear();
        return render_svg_chart(spec);
    };
    write_text_file(dir / "iterations.svg",
                    chart("transport iterations per step", "iterations (incl. wasted)", false, false));
    write_text_file(dir / "cumulative_iterations.svg",
                    chart("cumulative transport iterations", "iterations", true, false));
    if (options.include_timing)
        write_text_file(dir / "cumulative_time.svg",
                        chart("cumulative wall time", "seconds", true, true));
}

} // namespace fracflow
