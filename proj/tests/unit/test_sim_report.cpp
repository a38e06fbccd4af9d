#include <doctest.h>

#include "fixtures.hpp"
#include "fracflow/bench.hpp"
#include "fracflow/case.hpp"
#include "fracflow/netgen.hpp"
#include "fracflow/report.hpp"

#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <sstream>

using namespace fracflow;
using namespace fixtures;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("fracflow_unit_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

StepReport report_row(int step, double dt_days, int flow, int transport, int wasted, int cuts, bool act)
{
    StepReport r;
    r.step = step;
    r.dt = dt_days * units::day;
    r.flow_iterations = flow;
    r.transport_iterations = transport;
    r.wasted_iterations = wasted;
    r.cuts = cuts;
    r.activated = act;
    r.activations = act ? 1 : 0;
    r.wall_seconds = 0.123;
    return r;
}

} // namespace

TEST_CASE("time step ramp")
{
    SolverConfig config;
    std::vector<double> seen;
    double dt = config.dt_initial;
    for (int k = 0; k < 7; ++k) {
        seen.push_back(dt / units::day);
        dt = ramp_schedule(dt, config);
    }
    CHECK(seen == std::vector<double>{1, 2, 4, 8, 16, 30, 30});
    CHECK(ramp_schedule(30 * units::day, config) == 30 * units::day);
}

TEST_CASE("control steps cover the schedule")
{
    SolverConfig config;
    Schedule s;
    s.total_time = 100 * units::day;
    auto steps = control_steps(s, config);
    CHECK(steps.size() == 8);
    CHECK(std::accumulate(steps.begin(), steps.end(), 0.0) == s.total_time);
    CHECK(steps.back() == doctest::Approx(9 * units::day));

    // A rate change at day 10 splits the fourth step.
    s.rate_changes.push_back({10 * units::day, 2.0});
    steps = control_steps(s, config);
    double t = 0.0;
    bool boundary = false;
    for (double dt : steps) {
        t += dt;
        boundary = boundary || std::abs(t - 10 * units::day) < 1e-6;
    }
    CHECK(boundary);
    CHECK(steps[3] == doctest::Approx(3 * units::day));

    s.total_time = 0.0;
    CHECK_THROWS_AS(control_steps(s, config), ConfigError);
}

TEST_CASE("packaged case1 schedule")
{
    const auto config = load_case(std::filesystem::path(FRACFLOW_DATA_DIR) / "case1.case");
    const auto steps = control_steps(config.schedule, config.solver);
    CHECK(steps.size() == 71);
    CHECK(std::accumulate(steps.begin(), steps.end(), 0.0) == config.schedule.total_time);
}

TEST_CASE("zero tolerance exhausts the cuts")
{
    auto c = small_case();
    c.schedule.total_time = 2 * units::day;
    SolverConfig config;
    config.tolerance = 0.0;
    config.max_cuts = 3;
    try {
        run_simulation(c, config);
        FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
        const auto& partial = e.partial();
        REQUIRE_FALSE(partial.steps.empty());
        CHECK(partial.steps.back().cuts == config.max_cuts);
    }
}

TEST_CASE("zero-rate wells need no cuts")
{
    auto c = small_case({}, 0.0);
    c.schedule.total_time = 60 * units::day;
    SolverConfig config;
    const auto result = run_simulation(c, config);
    CHECK(result.steps.size() == 6);
    for (const auto& step : result.steps) {
        CHECK(step.cuts == 0);
        CHECK(step.transport_iterations == 0);
        CHECK(step.flow_iterations == 0);
    }
    CHECK(result.final_state.saturation == c.initial.saturation);
}

TEST_CASE("small case run conserves water and stays in bounds")
{
    auto c = small_case(incompressible(), 1.0);
    c.schedule.total_time = 120 * units::day;
    for (auto kind : {SolverKind::newton, SolverKind::en_ne}) {
        SolverConfig config;
        config.solver_kind = kind;
        const auto result = run_simulation(c, config);
        double injected = 0.0;
        for (const auto& step : result.steps) {
            injected += step.water_injected;
            CHECK(step.min_saturation >= -1e-9);
            CHECK(step.max_saturation <= 1 + 1e-9);
        }
        REQUIRE(injected > 0.0);
        for (const auto& step : result.steps)
            CHECK(step.water_balance_error <= 1e-6 * injected);
    }
}

TEST_CASE("solver kind names")
{
    CHECK(parse_solver_kind("newton") == SolverKind::newton);
    CHECK(parse_solver_kind("enne") == SolverKind::en_ne);
    CHECK(std::string(to_string(SolverKind::en_ne)) == "enne");
    CHECK_THROWS_AS(parse_solver_kind("picard"), ConfigError);
}

TEST_CASE("steps csv")
{
    const std::vector<StepReport> steps{report_row(1, 1.0, 3, 4, 0, 0, false),
                                        report_row(2, 2.5, 2, 7, 5, 1, true)};
    std::ostringstream timed, masked;
    write_steps_csv(timed, steps, true);
    write_steps_csv(masked, steps, false);

    std::istringstream lines(masked.str());
    std::string header, first, second, extra;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    CHECK(header == "step,dt_days,flow_iters,transport_iters,wasted,cuts,activated,wall_s");
    CHECK(first.starts_with("1,1.000000,3,4,0,0,0,"));
    CHECK(second.starts_with("2,2.500000,2,7,5,1,1,"));
    CHECK(second.ends_with(",0.000000"));
    CHECK_FALSE(std::getline(lines, extra));
    CHECK(timed.str().find("0.123") != std::string::npos);
    CHECK(masked.str().find("0.123") == std::string::npos);
}

TEST_CASE("arm totals")
{
    ArmResult arm;
    arm.steps = {report_row(1, 1.0, 3, 4, 0, 0, false), report_row(2, 2.0, 2, 7, 5, 1, true),
                 report_row(3, 4.0, 1, 2, 0, 0, true)};
    summarize(arm);
    CHECK(arm.transport_iterations == 13);
    CHECK(arm.wasted_iterations == 5);
    CHECK(arm.total_iterations == 18);
    CHECK(arm.flow_iterations == 6);
    CHECK(arm.cuts == 1);
    CHECK(arm.activations == 2);
}

TEST_CASE("svg chart")
{
    ChartSpec spec;
    spec.title = "iterations";
    spec.x_label = "time";
    spec.y_label = "count";
    spec.series.push_back({"newton", "#1f77b4", {0, 1, 2}, {0, 5, 9}, {}});
    spec.series.push_back({"enne", "#d62728", {0, 1, 2}, {0, 4, 7}, {false, true, false}});
    const std::string svg = render_svg_chart(spec);
    CHECK(svg.starts_with("<svg"));
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("newton") != std::string::npos);
    CHECK(svg.find("#d62728") != std::string::npos);
}

TEST_CASE("vtk round trip")
{
    const auto c = small_case();
    const auto dir = scratch("vtk");
    write_vtk_snapshot(c.initial, c.model, dir / "m.vtk");
    const auto info = read_vtk_info(dir / "m.vtk");
    CHECK(info.dimensions[0] == 11);
    CHECK(info.dimensions[1] == 11);
    CHECK(info.dimensions[2] == 2);
    CHECK(info.cells == 100);
    CHECK(info.fields == std::vector<std::string>{"Sw", "p"});

    write_vtk_fractures(c.initial, c.model, dir / "f.vtk");
    const auto frac = read_vtk_info(dir / "f.vtk");
    CHECK(frac.cells == c.model.num_cells() - 100);
    CHECK(frac.fields == std::vector<std::string>{"Sw", "p"});
    std::filesystem::remove_all(dir);
}

TEST_CASE("network generator")
{
    NetworkGeneratorParams params;
    params.seed = 7;
    const auto a = generate_fracture_network(params);
    const auto b = generate_fracture_network(params);
    REQUIRE(a.fractures.size() == 48);
    for (std::size_t k = 0; k < a.fractures.size(); ++k) {
        CHECK(a.fractures[k].start[0] == b.fractures[k].start[0]);
        CHECK(a.fractures[k].end[1] == b.fractures[k].end[1]);
        for (const auto& p : {a.fractures[k].start, a.fractures[k].end}) {
            CHECK(p[0] >= 0.0);
            CHECK(p[0] <= params.domain[0]);
            CHECK(p[1] >= 0.0);
            CHECK(p[1] <= params.domain[1]);
        }
    }
    params.seed = 8;
    CHECK(generate_fracture_network(params).fractures[0].start[0] != a.fractures[0].start[0]);
    params.count = 0;
    CHECK(generate_fracture_network(params).fractures.empty());
}

TEST_CASE("thread cap")
{
    ::unsetenv("FRACFLOW_THREADS");
    CHECK(thread_cap(2) == 2);
    ::setenv("FRACFLOW_THREADS", "1", 1);
    CHECK(thread_cap(2) == 1);
    ::setenv("FRACFLOW_THREADS", "zero", 1);
    CHECK(thread_cap(3) == 3);
    ::setenv("FRACFLOW_THREADS", "0", 1);
    CHECK(thread_cap(3) == 3);
    ::unsetenv("FRACFLOW_THREADS");
}

TEST_CASE("benchmark arms start from the same state")
{
    auto c = small_case();
    c.schedule.total_time = 40 * units::day;
    SolverConfig base;
    const auto result = run_benchmark(c, base, {1});
    CHECK_FALSE(result.newton.failed);
    CHECK_FALSE(result.en_ne.failed);
    CHECK(result.newton.kind == SolverKind::newton);
    CHECK(result.en_ne.kind == SolverKind::en_ne);
    CHECK(result.newton.steps.size() == result.en_ne.steps.size());
    CHECK(result.newton.activations == 0);
}
