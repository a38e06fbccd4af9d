// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include "fixtures.hpp"
#include "fracflow/bench.hpp"
#include "fracflow/case.hpp"
#include "fracflow/flow.hpp"
#include "fracflow/nepc.hpp"
#include "fracflow/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>

using namespace fracflow;
using namespace fixtures;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format(const char* fmt, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

CaseConfig packaged(const std::string& name)
{
    return load_case(fs::path(FRACFLOW_DATA_DIR) / (name + ".case"));
}

// Benchmarks shared between criteria.
struct Runs {
    std::optional<BenchmarkResult> case1;
    std::optional<BenchmarkResult> case2;
    double case2_seconds = 0.0;
};

BenchmarkResult bench(const std::string& name, double* seconds = nullptr)
{
    const auto config = packaged(name);
    const auto sim_case = build_case(config);
    const auto t0 = Clock::now();
    auto result = run_benchmark(sim_case, config.solver, {1});
    if (seconds)
        *seconds = seconds_since(t0);
    return result;
}

bool in_bounds(const std::vector<StepReport>& steps, const SimState& final_state, std::string& why)
{
    for (const auto& s : steps)
        if (s.min_saturation < -1e-9 || s.max_saturation > 1 + 1e-9) {
            why = format("step %d range [%.3e, %.12f]", s.step, s.min_saturation, s.max_saturation);
            return false;
        }
    for (double s : final_state.saturation)
        if (!(s >= -1e-9 && s <= 1 + 1e-9)) {
            why = format("final saturation %.12f", s);
            return false;
        }
    return true;
}

Outcome jacobian_fidelity()
{
    const auto t0 = Clock::now();
    const auto c = small_case();
    const auto& m = c.model;
    const int n = m.num_cells();
    const double dt = 20 * units::day;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> us(0.02, 0.98);
    std::vector<double> s_prev(n);
    for (auto& v : s_prev)
        v = us(rng);
    const FlowProblem problem(m, c.initial.pressure, s_prev, dt);
    SymmetricDirectSolver ldlt;
    NewtonControls controls;
    controls.tolerance = 1e-8;
    const auto flow = solve_flow(problem, Vector::Constant(n, 1e7), controls, ldlt);
    if (!flow.report.converged)
        return {false, "flow solve did not converge"};
    const auto sys = make_transport_system(m, flow.state, c.initial.pressure, s_prev, dt);

    double worst = 0.0;
    const int states = 20;
    for (int k = 0; k < states; ++k) {
        Vector s(n);
        for (int i = 0; i < n; ++i)
            s[i] = us(rng);
        const Eigen::MatrixXd jac = Eigen::MatrixXd(sys.linearize(s).jacobian);
        const double h = 1e-6;
        for (int j = 0; j < n; ++j) {
            Vector sp = s, sm = s;
            sp[j] += h;
            sm[j] -= h;
            const Vector fd = (sys.residual(sp) - sys.residual(sm)) / (2 * h);
            const double scale = jac.col(j).cwiseAbs().maxCoeff();
            worst = std::max(worst, (fd - jac.col(j)).cwiseAbs().maxCoeff() / scale);
        }
    }
    const double elapsed = seconds_since(t0);
    return {worst <= 1e-6 && elapsed < 10.0,
            format("%d states, %d unknowns, max relative column error %.2e, %.2f s", states, n, worst,
                   elapsed)};
}

Outcome conservation()
{
    auto config = packaged("case1");
    config.fluid.c_w = 0.0;
    config.fluid.c_o = 0.0;
    const auto sim_case = build_case(config);
    auto solver = config.solver;
    solver.solver_kind = SolverKind::newton;
    const auto t0 = Clock::now();
    const auto result = run_simulation(sim_case, solver);
    const double elapsed = seconds_since(t0);

    double injected = 0.0, produced = 0.0, worst_step = 0.0;
    for (const auto& s : result.steps) {
        injected += s.water_injected;
        produced += s.water_produced;
    }
    for (const auto& s : result.steps)
        worst_step = std::max(worst_step, s.water_balance_error / injected);
    // Cumulative: storage change against net injection, from the states alone.
    double storage = 0.0;
    const auto& m = sim_case.model;
    for (int i = 0; i < m.num_cells(); ++i)
        storage += m.pore_volume[i] * (result.final_state.saturation[i] - sim_case.initial.saturation[i]);
    const double cumulative = std::abs(storage - (injected - produced)) / injected;
    return {injected > 0.0 && worst_step <= 1e-6 && cumulative <= 1e-6 && elapsed < 60.0,
            format("%zu steps, injected %.4e m3, worst step %.2e, cumulative %.2e, %.1f s",
                   result.steps.size(), injected, worst_step, cumulative, elapsed)};
}

Outcome bounds(Runs& runs)
{
    std::string why;
    int checked = 0;
    const std::pair<const char*, const BenchmarkResult*> all[] = {{"case1", &*runs.case1},
                                                                  {"case2", &*runs.case2}};
    for (const auto& [name, r] : all)
        for (const ArmResult* arm : {&r->newton, &r->en_ne}) {
            if (arm->failed)
                return {false, format("%s %s failed: %s", name, to_string(arm->kind), arm->error.c_str())};
            if (!in_bounds(arm->steps, arm->final_state, why))
                return {false, format("%s %s: %s", name, to_string(arm->kind), why.c_str())};
            ++checked;
        }

    // case3 is checked on its leading year to stay within desk runtime. The
    // injection rate keeps its five-year basis.
    auto config = packaged("case3");
    for (auto& w : config.wells)
        if (w.rate_pv_period == 0.0)
            w.rate_pv_period = config.schedule.total_time;
    config.schedule.total_time = 1.0 * units::year;
    const auto sim_case = build_case(config);
    auto solver = config.solver;
    solver.solver_kind = SolverKind::en_ne;
    const auto arm = run_arm(sim_case, solver);
    if (arm.failed)
        return {false, format("case3 failed: %s", arm.error.c_str())};
    if (!in_bounds(arm.steps, arm.final_state, why))
        return {false, format("case3: %s", why.c_str())};
    ++checked;
    return {true, format("%d runs within [-1e-9, 1+1e-9]", checked)};
}

Outcome oracle_equivalence()
{
    const double flux = 2e-4;
    double worst = 0.0;
    for (std::uint64_t seed : {5u, 6u, 7u, 8u}) {
        const auto sys = chain(10, flux, 20 * units::day, seed);
        const auto oracle = bisection_oracle(sys, flux);
        SparseDirectSolver lu;
        const auto sol = newton_solve(sys, Eigen::Map<const Vector>(sys.s_prev.data(), 10),
                                      transport_controls(1e-14, 50, 0.2), lu);
        if (!sol.report.converged)
            return {false, format("seed %d did not converge", static_cast<int>(seed))};
        for (int i = 0; i < 10; ++i)
            worst = std::max(worst, std::abs(sol.saturation[i] - oracle[i]));
    }
    return {worst <= 1e-10, format("max |S - S_oracle| = %.2e", worst)};
}

Outcome preconditioner_soundness()
{
    auto config = packaged("case1");
    config.solver.activation.gamma = std::numeric_limits<double>::infinity();
    config.solver.activation.activate_on_cut = false;
    const auto sim_case = build_case(config);
    const auto r = run_benchmark(sim_case, config.solver, {1});
    if (r.newton.failed || r.en_ne.failed)
        return {false, "an arm failed"};
    const auto& a = r.newton.steps;
    const auto& b = r.en_ne.steps;
    bool same = a.size() == b.size();
    for (std::size_t k = 0; same && k < a.size(); ++k)
        same = a[k].dt == b[k].dt && a[k].flow_iterations == b[k].flow_iterations &&
               a[k].transport_iterations == b[k].transport_iterations &&
               a[k].wasted_iterations == b[k].wasted_iterations && a[k].cuts == b[k].cuts &&
               a[k].substeps == b[k].substeps && a[k].activated == b[k].activated;
    same = same && r.newton.final_state.saturation == r.en_ne.final_state.saturation;
    return {same && r.en_ne.activations == 0,
            format("%zu steps, transport iterations %d vs %d, activations %d", a.size(),
                   r.newton.transport_iterations, r.en_ne.transport_iterations, r.en_ne.activations)};
}

// Two crossing fractures in a 20x20 block with the matrix exchange removed.
// Injector and producer sit on the two ends of the first fracture.
Outcome decoupled_limit()
{
    FractureNetwork net;
    net.fractures.push_back(trace({13, 97}, {187, 104}));
    net.fractures.push_back(trace({96, 22}, {103, 176}));
    auto model = make_model({20, 20, 1}, {200, 200, 10}, net, FluidModel{}, {});
    for (auto& c : model.connections)
        if (c.kind == ConnectionKind::matrix_fracture)
            c.trans = 0.0;
    int first = -1, last = -1;
    for (int k = 0; k < model.topology.num_fracture(); ++k)
        if (model.topology.fracture_cells[k].fracture == 0) {
            if (first < 0)
                first = model.num_matrix() + k;
            last = model.num_matrix() + k;
        }
    const double rate = 2.0 * model.topology.fracture_pore_volume() / (30 * units::day);
    model.wells.push_back(rate_well("INJ", WellKind::injector, last, rate, 1e-12));
    model.wells.push_back(bhp_well("PROD", WellKind::producer, first, 100 * units::bar, 1e-12));

    Schedule schedule;
    schedule.total_time = 90 * units::day;
    const SolverConfig config;
    const auto steps = control_steps(schedule, config);
    const auto controls = transport_controls(config.tolerance, config.max_newton, config.max_saturation_change);
    NewtonControls flow_controls;
    flow_controls.tolerance = config.flow_tolerance;

    // Both arms advance their own state. NE is forced on every EN-NE step
    // through the cut safeguard.
    SimState newton_state = initial_state(model, 100 * units::bar, 0.0);
    SimState enne_state = newton_state;
    SymmetricDirectSolver flow_a, flow_b;
    SparseDirectSolver lin_a, lin_b, lin_local;
    const ActivationConfig activation;
    int violations = 0, newton_total = 0, enne_total = 0;
    for (double dt : steps) {
        const auto advance = [&](SimState& state, bool enne, LinearSolver& flow_lin) {
            const FlowProblem problem(model, state.pressure, state.saturation, dt);
            const auto flow = solve_flow(problem, Eigen::Map<const Vector>(state.pressure.data(), model.num_cells()),
                                         flow_controls, flow_lin);
            if (!flow.report.converged)
                throw std::runtime_error("flow did not converge");
            const auto sys = make_transport_system(model, flow.state, state.pressure, state.saturation, dt);
            const Vector u0 = Eigen::Map<const Vector>(state.saturation.data(), model.num_cells());
            const auto sol = enne ? en_ne_solve(sys, u0, FluxHistory{}, true, controls, activation, lin_b, lin_local)
                                  : newton_solve(sys, u0, controls, lin_a);
            if (!sol.report.converged)
                throw std::runtime_error("transport did not converge");
            state.pressure = flow.state.pressure;
            state.saturation.assign(sol.saturation.data(), sol.saturation.data() + sol.saturation.size());
            return sol.report.iterations;
        };
        const int a = advance(newton_state, false, flow_a);
        const int b = advance(enne_state, true, flow_b);
        newton_total += a;
        enne_total += b;
        if (b > a)
            ++violations;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < newton_state.saturation.size(); ++i)
        diff = std::max(diff, std::abs(newton_state.saturation[i] - enne_state.saturation[i]));
    double sf_max = 0.0;
    for (int i = model.num_matrix(); i < model.num_cells(); ++i)
        sf_max = std::max(sf_max, enne_state.saturation[i]);
    return {violations == 0 && diff <= 1e-8 && sf_max > 0.1,
            format("%zu steps, global iterations %d (Newton) vs %d (EN-NE), steps with more: %d, "
                   "max state difference %.2e",
                   steps.size(), newton_total, enne_total, violations, diff)};
}

FluxHistory history_of(const std::vector<std::vector<double>>& series)
{
    FluxHistory h;
    for (const auto& f : series)
        h.record(f);
    return h;
}

Outcome criterion_units()
{
    const ActivationConfig config;
    const double q = 2.5e-5;
    const auto linear = activation_criterion(history_of({{q, 3 * q}, {2 * q, 4 * q}, {3 * q, 5 * q}}), config);
    const auto step = activation_criterion(history_of({{q}, {q}, {2 * q}}), config);
    const auto cut = activation_criterion(history_of({{q}, {2 * q}, {3 * q}}), config, true);
    const auto cut_young = activation_criterion(FluxHistory{}, config, true);
    const bool ok = std::abs(linear.score) <= 1e-12 && !linear.activate &&
                    std::abs(step.score - 1.0) <= 1e-6 && step.score > config.gamma && step.activate &&
                    cut.activate && cut_young.activate;
    return {ok, format("linear %.1e (%s), step %.6f (%s), after cut (%s)", linear.score,
                       linear.activate ? "on" : "off", step.score, step.activate ? "on" : "off",
                       cut.activate && cut_young.activate ? "on" : "off")};
}

Outcome directional_benchmark(Runs& runs)
{
    const auto& r = *runs.case2;
    if (r.newton.failed || r.en_ne.failed)
        return {false, "an arm failed"};
    const double reduction = 1.0 - static_cast<double>(r.en_ne.total_iterations) / r.newton.total_iterations;
    const bool ok = r.en_ne.total_iterations <= r.newton.total_iterations && reduction >= 0.05 &&
                    r.en_ne.wasted_iterations <= r.newton.wasted_iterations &&
                    r.newton.wall_seconds < 300.0 && r.en_ne.wall_seconds < 300.0;
    return {ok, format("Newton %d (%d wasted), EN-NE %d (%d wasted), reduction %.1f%%, arms %.1f s / %.1f s",
                       r.newton.total_iterations, r.newton.wasted_iterations, r.en_ne.total_iterations,
                       r.en_ne.wasted_iterations, 100.0 * reduction, r.newton.wall_seconds,
                       r.en_ne.wall_seconds)};
}

Outcome selectivity(Runs& runs)
{
    const auto& arm = runs.case1->en_ne;
    if (arm.failed)
        return {false, "EN-NE arm failed"};
    const double ratio = static_cast<double>(arm.activations) / static_cast<double>(arm.steps.size());
    return {ratio <= 0.5, format("%d activations over %zu steps (%.2f)", arm.activations, arm.steps.size(), ratio)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(Runs& runs)
{
    const auto config = packaged("case1");
    const auto sim_case = build_case(config);
    const auto root = fs::temp_directory_path() / "fracflow_acceptance";
    fs::remove_all(root);
    const OutputOptions options{false, false};
    write_benchmark_outputs(*runs.case1, sim_case, root / "a", options);
    write_benchmark_outputs(run_benchmark(sim_case, config.solver, {1}), sim_case, root / "b", options);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        if (entry.path().extension() != ".csv")
            continue;
        const auto other = root / "b" / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other))
            return {false, format("%s differs", entry.path().filename().string().c_str())};
        ++files;
    }
    fs::remove_all(root);
    return {files >= 3, format("%d CSV files byte-identical", files)};
}

} // namespace

int main()
{
    Runs runs;
    int failures = 0;
    const auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
        Outcome out;
        try {
            out = check();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %d %s: %s\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str());
        std::fflush(stdout);
        failures += out.pass ? 0 : 1;
    };

    runs.case1 = bench("case1");
    runs.case2 = bench("case2", &runs.case2_seconds);

    report(1, "jacobian fidelity", jacobian_fidelity);
    report(2, "conservation", conservation);
    report(3, "bounds", [&] { return bounds(runs); });
    report(4, "oracle equivalence", oracle_equivalence);
    report(5, "preconditioner soundness", preconditioner_soundness);
    report(6, "decoupled limit", decoupled_limit);
    report(7, "criterion units", criterion_units);
    report(8, "directional benchmark", [&] { return directional_benchmark(runs); });
    report(9, "selectivity", [&] { return selectivity(runs); });
    report(10, "determinism", [&] { return determinism(runs); });
    return failures == 0 ? 0 : 1;
}
