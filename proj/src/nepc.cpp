#include "fracflow/nepc.hpp"

#include "fracflow/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>

namespace fracflow {

SubdomainMaps::SubdomainMaps(int size, std::vector<int> fracture_set)
    : fracture_set_(std::move(fracture_set)), local_of_(static_cast<std::size_t>(size), -1)
{
    for (std::size_t k = 0; k < fracture_set_.size(); ++k) {
        const int g = fracture_set_[k];
        if (g < 0 || g >= size)
            throw Error("fracture index outside the unknown range");
        if (local_of_[g] >= 0)
            throw Error("duplicate fracture index " + std::to_string(g));
        local_of_[g] = static_cast<int>(k);
    }
    matrix_set_.reserve(static_cast<std::size_t>(size) - fracture_set_.size());
    for (int g = 0; g < size; ++g)
        if (local_of_[g] < 0)
            matrix_set_.push_back(g);
}

SubdomainMaps SubdomainMaps::from_partition(int num_matrix, int size)
{
    std::vector<int> frac(static_cast<std::size_t>(size - num_matrix));
    for (int k = 0; k < size - num_matrix; ++k)
        frac[k] = num_matrix + k;
    return SubdomainMaps(size, std::move(frac));
}

Vector SubdomainMaps::restrict_to_fracture(const Vector& v) const
{
    Vector w(fracture_size());
    for (int k = 0; k < fracture_size(); ++k)
        w[k] = v[fracture_set_[k]];
    return w;
}

Vector SubdomainMaps::matrix_part(const Vector& v) const
{
    Vector out = v;
    for (int g : fracture_set_)
        out[g] = 0.0;
    return out;
}

Vector SubdomainMaps::prolong_fracture(const Vector& w) const
{
    Vector out = Vector::Zero(size());
    for (int k = 0; k < fracture_size(); ++k)
        out[fracture_set_[k]] = w[k];
    return out;
}

void FluxHistory::record(std::vector<double> flux)
{
    slots_[2] = std::move(slots_[1]);
    slots_[1] = std::move(slots_[0]);
    slots_[0] = std::move(flux);
    depth_ = std::min(depth_ + 1, 3);
}

void ActivationConfig::validate() const
{
    if (!(gamma > 0.0))
        throw ConfigError("solver.gamma", "threshold must be positive");
    if (local_max_iters < 1)
        throw ConfigError("solver.local_iterations", "must be >= 1");
    if (!(eps_flux >= 0.0))
        throw ConfigError("solver.eps_flux", "must be non-negative");
}

Activation activation_criterion(const FluxHistory& history, const ActivationConfig& config,
                                bool after_cut)
{
    Activation result;
    if (history.depth() >= 3) {
        const auto& f0 = history.at(0);
        const auto& f1 = history.at(1);
        const auto& f2 = history.at(2);
        const std::size_t faces = std::min({f0.size(), f1.size(), f2.size()});
        double total = 0.0;
        std::size_t counted = 0;
        for (std::size_t i = 0; i < faces; ++i) {
            const double d1 = f0[i] - f1[i];
            const double d1_prev = f1[i] - f2[i];
            const double d2 = d1 - d1_prev;
            if (config.reduction == Reduction::mean && std::abs(d1) <= config.eps_flux)
                continue;
            total += std::abs(d2) / (std::abs(d1) + config.eps_flux);
            ++counted;
        }
        if (config.reduction == Reduction::mean)
            result.score = counted > 0 ? total / static_cast<double>(counted) : 0.0;
        else
            result.score = total;
        result.activate = result.score > config.gamma;
    }
    if (after_cut && config.activate_on_cut)
        result.activate = true;
    return result;
}

std::vector<double> matrix_fracture_water_flux(const TransportSystem& system, const Vector& s)
{
    std::vector<double> out;
    for (const auto& c : system.connections) {
        if (c.kind != ConnectionKind::matrix_fracture)
            continue;
        const int up = c.flux >= 0.0 ? c.a : c.b;
        const double water = system.fluid.fractional_flow(s[up]).fw * c.flux;
        // Orient matrix -> fracture.
        out.push_back(c.a < system.num_matrix ? water : -water);
    }
    return out;
}

TransportSystem extract_fracture_subproblem(const TransportSystem& global, const Vector& u,
                                            const SubdomainMaps& maps, bool drop_exchange)
{
    if (maps.fracture_size() == 0)
        throw EmptySubdomain("fracture subdomain is empty; nonlinear elimination is inapplicable");
    if (maps.size() != global.size())
        throw Error("subdomain maps do not match the transport system");

    TransportSystem sub;
    sub.fluid = global.fluid;
    sub.dt = global.dt;
    sub.num_matrix = 0;
    const auto frac = maps.fracture_set();
    for (int g : frac) {
        sub.pore_volume.push_back(global.pore_volume[g]);
        sub.s_prev.push_back(global.s_prev[g]);
        sub.shrinkage.push_back(global.shrinkage[g]);
    }

    for (const auto& c : global.connections) {
        const int la = maps.fracture_local(c.a);
        const int lb = maps.fracture_local(c.b);
        if (la >= 0 && lb >= 0) {
            sub.connections.push_back({la, lb, c.flux, c.kind});
            continue;
        }
        if (la < 0 && lb < 0)
            continue;
        if (drop_exchange)
            continue;
        // Exchange with a frozen matrix cell; inflow > 0 means matrix -> fracture.
        const int local = la >= 0 ? la : lb;
        const int matrix = la >= 0 ? c.b : c.a;
        const double inflow = la >= 0 ? -c.flux : c.flux;
        if (inflow > 0.0)
            sub.sources.push_back({local, inflow, global.fluid.fractional_flow(u[matrix]).fw});
        else if (inflow < 0.0)
            sub.sources.push_back({local, inflow, 0.0});
    }
    for (const auto& src : global.sources) {
        const int local = maps.fracture_local(src.cell);
        if (local >= 0)
            sub.sources.push_back({local, src.rate, src.inflow_water_fraction});
    }
    return sub;
}

LocalSolveResult local_fracture_solve(const TransportSystem& subproblem, const Vector& u_f,
                                      const NewtonControls& controls, LinearSolver& linear)
{
    LocalSolveResult result;
    result.u_f = u_f;
    const NewtonReport report = newton_iterate(subproblem, result.u_f, controls, linear);
    result.iterations = report.iterations;
    result.converged = report.converged;
    if (report.singular) {
        std::clog << "warning: singular fracture subproblem Jacobian; skipping elimination\n";
        result.u_f = u_f;
        result.singular = true;
    }
    return result;
}

Vector inject_update(const Vector& u, const Vector& u_f, const SubdomainMaps& maps)
{
    if (u.size() != maps.size() || u_f.size() != maps.fracture_size())
        throw Error("inject_update: dimensions do not match the partition");
    Vector out = u;
    const auto frac = maps.fracture_set();
    for (int k = 0; k < maps.fracture_size(); ++k)
        out[frac[k]] = u_f[k];
    return out;
}

TransportSolution en_ne_solve(const TransportSystem& system, const Vector& u0,
                              const FluxHistory& history, bool after_cut,
                              const NewtonControls& controls, const ActivationConfig& config,
                              LinearSolver& global_linear, LinearSolver& local_linear)
{
    const Activation decision = activation_criterion(history, config, after_cut);
    const auto maps = SubdomainMaps::from_partition(system.num_matrix, system.size());
    const bool applicable = decision.activate && maps.fracture_size() > 0 &&
                            system.residual_norm(system.residual(u0)) > controls.tolerance;
    if (!applicable) {
        TransportSolution sol = newton_solve(system, u0, controls, global_linear);
        sol.report.criterion_score = decision.score;
        return sol;
    }

    const auto started = std::chrono::steady_clock::now();
    const TransportSystem sub = extract_fracture_subproblem(system, u0, maps, config.drop_exchange);
    NewtonControls local_controls = controls;
    local_controls.max_iterations = config.local_max_iters;
    const LocalSolveResult local =
        local_fracture_solve(sub, maps.restrict_to_fracture(u0), local_controls, local_linear);
    const Vector start = inject_update(u0, local.u_f, maps);
    const double local_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    TransportSolution sol = newton_solve(system, start, controls, global_linear);
    sol.report.activated = true;
    sol.report.criterion_score = decision.score;
    sol.report.local_iterations = local.iterations;
    sol.report.wall_seconds += local_seconds;
    return sol;
}

} // namespace fracflow
