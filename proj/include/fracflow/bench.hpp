#pragma once

#include "fracflow/sim.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fracflow {

struct ArmResult {
    SolverKind kind = SolverKind::newton;
    std::vector<StepReport> steps;
    SimState final_state;
    std::vector<Snapshot> snapshots;
    bool failed = false;
    std::string error;

    int transport_iterations = 0; ///< accepted attempts only
    int wasted_iterations = 0;
    int total_iterations = 0;     ///< transport + wasted
    int flow_iterations = 0;
    int cuts = 0;
    int activations = 0;          ///< control steps with NE active
    double wall_seconds = 0.0;
};

/// Fills the totals of an arm from its step series.
void summarize(ArmResult& arm);

struct BenchmarkResult {
    ArmResult newton;
    ArmResult en_ne;
};

struct BenchmarkOptions {
    /// Upper bound on concurrently running arms; FRACFLOW_THREADS overrides
    /// when set. 1 runs the arms one after the other.
    int max_threads = 2;
};

/// Runs the Newton and EN-NE arms from the same initial state. A failing arm
/// keeps its partial series and the error text instead of throwing.
BenchmarkResult run_benchmark(const SimulationCase& sim_case, const SolverConfig& base,
                              const BenchmarkOptions& options = {});

ArmResult run_arm(const SimulationCase& sim_case, const SolverConfig& config);

/// Thread cap from FRACFLOW_THREADS (>= 1), or `fallback` when unset/invalid.
int thread_cap(int fallback);

struct OutputOptions {
    bool include_timing = true;
    bool write_vtk = true;
};

/// CSV series, summary, SVG charts and VTK snapshots under `dir`.
void write_arm_outputs(const ArmResult& arm, const SimulationCase& sim_case,
                       const std::filesystem::path& dir, const OutputOptions& options);
void write_benchmark_outputs(const BenchmarkResult& result, const SimulationCase& sim_case,
                             const std::filesystem::path& dir, const OutputOptions& options);

} // namespace fracflow
