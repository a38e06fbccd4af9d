#pragma once

#include "fracflow/linear_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <limits>
#include <vector>

namespace fracflow {

struct NewtonControls {
    double tolerance = 1e-6;
    int max_iterations = 25;
    /// Per-unknown cap on |du| in one iteration.
    double max_update = std::numeric_limits<double>::infinity();
    /// Project iterates onto [0, 1] (saturation unknowns).
    bool project_unit_interval = false;
};

struct NewtonReport {
    int iterations = 0;
    bool converged = false;
    bool singular = false;
    std::vector<double> residual_history; ///< iterations + 1 entries
    double wall_seconds = 0.0;

    // Preconditioned solves only.
    bool activated = false;
    double criterion_score = 0.0;
    int local_iterations = 0;
};

template <class P>
concept NonlinearProblem = requires(const P& p, const Vector& u, const Vector& r) {
    { p.linearize(u) } -> std::same_as<Linearization>;
    { p.residual_norm(r) } -> std::convertible_to<double>;
};

/// Plain Newton-Raphson: u <- u - J^{-1} R(u), with an optional per-unknown
/// update clamp and [0, 1] projection. Stops on convergence, on the iteration
/// cap, or on a singular/non-finite linear solve. `u` holds the last iterate.
template <NonlinearProblem P>
NewtonReport newton_iterate(const P& problem, Vector& u, const NewtonControls& controls,
                            LinearSolver& linear)
{
    const auto started = std::chrono::steady_clock::now();
    NewtonReport report;
    Linearization lin = problem.linearize(u);
    double norm = problem.residual_norm(lin.residual);
    report.residual_history.push_back(norm);

    Vector du(u.size());
    while (std::isfinite(norm)) {
        if (norm <= controls.tolerance) {
            report.converged = true;
            break;
        }
        if (report.iterations >= controls.max_iterations)
            break;
        if (!linear.solve(lin.jacobian, -lin.residual, du)) {
            report.singular = true;
            break;
        }
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            double step = std::clamp(du[i], -controls.max_update, controls.max_update);
            double next = u[i] + step;
            if (controls.project_unit_interval)
                next = std::clamp(next, 0.0, 1.0);
            u[i] = next;
        }
        ++report.iterations;
        lin = problem.linearize(u);
        norm = problem.residual_norm(lin.residual);
        report.residual_history.push_back(norm);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

} // namespace fracflow
