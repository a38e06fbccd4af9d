#include "fracflow/bench.hpp"
#include "fracflow/case.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/netgen.hpp"
#include "fracflow/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using namespace fracflow;

namespace {

constexpr int exit_config = 2;
constexpr int exit_simulation = 3;

struct CaseOptions {
    std::string case_name;
    std::string solver;
    std::string gamma;
    std::string out_dir;
    bool no_timing = false;
    bool no_vtk = false;
};

void apply_overrides(const CaseOptions& o, SolverConfig& cfg)
{
    if (!o.solver.empty())
        cfg.solver_kind = parse_solver_kind(o.solver);
    if (!o.gamma.empty()) {
        try {
            cfg.activation.gamma = units::parse_quantity(o.gamma, units::Dimension::dimensionless);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("--gamma", e.what());
        }
        cfg.activation.validate();
    }
}

void print_arm(const ArmResult& a)
{
    std::printf("%-7s steps=%zu iterations=%d (wasted %d) flow=%d cuts=%d activations=%d wall=%.2fs%s\n",
                to_string(a.kind), a.steps.size(), a.total_iterations, a.wasted_iterations,
                a.flow_iterations, a.cuts, a.activations, a.wall_seconds,
                a.failed ? " FAILED" : "");
    if (a.failed)
        std::fprintf(stderr, "%s: %s\n", to_string(a.kind), a.error.c_str());
}

int cmd_run(const CaseOptions& o)
{
    CaseConfig config = load_case(resolve_case_path(o.case_name));
    apply_overrides(o, config.solver);
    const SimulationCase sim_case = build_case(config);
    std::printf("%s: %d matrix cells, %d fracture cells, pore volume %.6g m3\n",
                sim_case.name.c_str(), sim_case.model.num_matrix(),
                sim_case.model.topology.num_fracture(), sim_case.model.total_pore_volume());

    const ArmResult arm = run_arm(sim_case, config.solver);
    print_arm(arm);
    if (!o.out_dir.empty())
        write_arm_outputs(arm, sim_case, o.out_dir, {!o.no_timing, !o.no_vtk});
    return arm.failed ? exit_simulation : 0;
}

int cmd_bench(const CaseOptions& o)
{
    CaseConfig config = load_case(resolve_case_path(o.case_name));
    apply_overrides(o, config.solver);
    const SimulationCase sim_case = build_case(config);
    std::printf("%s: %d matrix cells, %d fracture cells\n", sim_case.name.c_str(),
                sim_case.model.num_matrix(), sim_case.model.topology.num_fracture());

    const BenchmarkResult result = run_benchmark(sim_case, config.solver);
    print_arm(result.newton);
    print_arm(result.en_ne);
    if (result.newton.total_iterations > 0)
        std::printf("iteration reduction: %.1f%%\n",
                    100.0 * (result.newton.total_iterations - result.en_ne.total_iterations) /
                        result.newton.total_iterations);
    write_benchmark_outputs(result, sim_case, o.out_dir, {!o.no_timing, !o.no_vtk});
    return result.newton.failed || result.en_ne.failed ? exit_simulation : 0;
}

struct GenOptions {
    std::uint64_t seed = 42;
    int count = 48;
    std::vector<double> extent{1000.0, 1000.0};
    double length_median = 100.0;
    double length_sigma = 0.5;
    std::vector<int> grid;
    int target_cells = 0;
    std::string output;
};

int cmd_gen(const GenOptions& o)
{
    NetworkGeneratorParams p;
    p.seed = o.seed;
    p.count = o.count;
    p.domain = {o.extent[0], o.extent[1]};
    p.length_median = o.length_median;
    p.length_log_sigma = o.length_sigma;
    p.length_max = std::max(p.length_max, 4.0 * p.length_median);
    if (o.count < 0)
        throw ConfigError("--count", "must be non-negative");
    FractureNetwork network = generate_fracture_network(p);
    if (o.target_cells > 0) {
        if (o.grid.size() != 2)
            throw ConfigError("--grid", "--target-cells needs --grid NX NY");
        const StructuredGrid grid({o.grid[0], o.grid[1], 1}, {o.extent[0], o.extent[1], 1.0});
        const int got = fit_network_to_cell_count(network, grid, o.target_cells);
        std::fprintf(stderr, "fracture cells: %d (target %d)\n", got, o.target_cells);
    }
    if (o.output.empty()) {
        write_fracture_network(std::cout, network);
    } else {
        std::ofstream out(o.output);
        if (!out)
            throw ConfigError(o.output, "cannot write");
        write_fracture_network(out, network);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fracflow: two-phase EDFM waterflood simulator with adaptive nonlinear elimination"};
    app.require_subcommand(1);

    CaseOptions run_opts;
    auto* run = app.add_subcommand("run", "simulate a case with one solver");
    run->add_option("case", run_opts.case_name, "case file or packaged case name")->required();
    run->add_option("--solver", run_opts.solver, "newton or enne")
        ->check(CLI::IsMember({"newton", "enne"}));
    run->add_option("--gamma", run_opts.gamma, "activation threshold (inf disables)");
    run->add_option("--out", run_opts.out_dir, "output directory");
    run->add_flag("--no-timing", run_opts.no_timing, "write wall_s as 0 for reproducible CSVs");
    run->add_flag("--no-vtk", run_opts.no_vtk, "skip VTK snapshots");

    CaseOptions bench_opts;
    auto* bench = app.add_subcommand("bench", "compare Newton and EN-NE on a case");
    bench->add_option("case", bench_opts.case_name, "case file or packaged case name")->required();
    bench->add_option("--out", bench_opts.out_dir, "output directory")->required();
    bench->add_option("--gamma", bench_opts.gamma, "activation threshold (inf disables)");
    bench->add_flag("--no-timing", bench_opts.no_timing, "write wall_s as 0 for reproducible CSVs");
    bench->add_flag("--no-vtk", bench_opts.no_vtk, "skip VTK snapshots");

    GenOptions gen_opts;
    auto* gen = app.add_subcommand("gen-frac", "generate a synthetic fracture network");
    gen->add_option("--seed", gen_opts.seed, "random seed")->required();
    gen->add_option("--count", gen_opts.count, "number of fractures")->required();
    gen->add_option("--extent", gen_opts.extent, "domain size X Y in m")->expected(2);
    gen->add_option("--length-median", gen_opts.length_median, "median trace length in m");
    gen->add_option("--length-sigma", gen_opts.length_sigma, "log-normal length spread");
    gen->add_option("--grid", gen_opts.grid, "grid NX NY used with --target-cells")->expected(2);
    gen->add_option("--target-cells", gen_opts.target_cells, "rescale to this many fracture cells");
    gen->add_option("-o,--output", gen_opts.output, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*run)
            return cmd_run(run_opts);
        if (*bench)
            return cmd_bench(bench_opts);
        return cmd_gen(gen_opts);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const InvalidGeometry& e) {
        std::fprintf(stderr, "invalid geometry: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simulation failure: %s\n", e.what());
        return exit_simulation;
    }
}
