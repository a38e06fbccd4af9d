#pragma once

#include "fracflow/linear_solver.hpp"
#include "fracflow/newton.hpp"
#include "fracflow/transport.hpp"

#include <array>
#include <span>
#include <vector>

namespace fracflow {

/// Partition of the transport unknowns into matrix (S_m) and fracture (S_f)
/// index sets, with the selection maps between R^n and the subspaces.
class SubdomainMaps {
public:
    SubdomainMaps(int size, std::vector<int> fracture_set);
    /// Matrix unknowns [0, num_matrix), fracture unknowns [num_matrix, size).
    static SubdomainMaps from_partition(int num_matrix, int size);

    int size() const noexcept { return static_cast<int>(local_of_.size()); }
    int fracture_size() const noexcept { return static_cast<int>(fracture_set_.size()); }
    std::span<const int> matrix_set() const noexcept { return matrix_set_; }
    std::span<const int> fracture_set() const noexcept { return fracture_set_; }
    /// Position of a global unknown in W_f coordinates, -1 for matrix unknowns.
    int fracture_local(int global) const noexcept { return local_of_[global]; }

    /// Pi_f v: fracture entries of v in W_f coordinates.
    Vector restrict_to_fracture(const Vector& v) const;
    /// Pi_m v: v with the fracture entries zeroed.
    Vector matrix_part(const Vector& v) const;
    /// Pi_f^T w: w scattered into a zero vector of length size().
    Vector prolong_fracture(const Vector& w) const;
    /// Psi_f R: fracture rows of a residual.
    Vector restrict_residual(const Vector& r) const { return restrict_to_fracture(r); }

private:
    std::vector<int> matrix_set_;
    std::vector<int> fracture_set_;
    std::vector<int> local_of_;
};

/// Water flux on every matrix-fracture face for the last accepted steps.
/// Slot 0 is F^n, slot 1 F^{n-1}, slot 2 F^{n-2}.
class FluxHistory {
public:
    void record(std::vector<double> flux);
    void clear() noexcept { depth_ = 0; }

    int depth() const noexcept { return depth_; }
    const std::vector<double>& at(int lag) const { return slots_.at(static_cast<std::size_t>(lag)); }

private:
    std::array<std::vector<double>, 3> slots_;
    int depth_ = 0;
};

enum class Reduction { mean, sum };

struct ActivationConfig {
    double gamma = 0.25;
    Reduction reduction = Reduction::mean;
    double eps_flux = 1e-12; ///< m^3/s
    int local_max_iters = 5;
    bool activate_on_cut = true;
    /// Drop matrix-fracture exchange from the local problem instead of
    /// freezing it.
    bool drop_exchange = false;

    void validate() const;
};

struct Activation {
    bool activate = false;
    double score = 0.0;
};

/// Score = reduction over faces of |D2 F_i| / (|D F_i| + eps) with
/// D F^n = F^n - F^{n-1}, D2 F^n = D F^n - D F^{n-1}. Faces with
/// |D F| <= eps are left out of the mean. Needs three recorded slots.
/// `after_cut` forces activation when the cut safeguard is enabled.
Activation activation_criterion(const FluxHistory& history, const ActivationConfig& config,
                                bool after_cut = false);

/// Water flux on the matrix-fracture connections of `system` at state s,
/// signed matrix -> fracture, in connection order.
std::vector<double> matrix_fracture_water_flux(const TransportSystem& system, const Vector& s);

/// Fracture-only transport problem at state u: fracture accumulation and
/// fracture-fracture fluxes implicit in u_f, matrix unknowns frozen.
/// Matrix-to-fracture inflow becomes a fixed water source f_w(S_m) F;
/// fracture-to-matrix outflow stays a sink at the fracture's fractional flow.
/// The local Jacobian is the (f, f) block of the global one.
/// Throws EmptySubdomain for an empty fracture set.
TransportSystem extract_fracture_subproblem(const TransportSystem& global, const Vector& u,
                                            const SubdomainMaps& maps, bool drop_exchange = false);

struct LocalSolveResult {
    Vector u_f;
    int iterations = 0;
    bool converged = false;
    bool singular = false;
};

/// At most controls.max_iterations Newton steps on the fracture problem.
/// The last iterate is returned even if unconverged; a singular local
/// Jacobian returns the entry iterate unchanged.
LocalSolveResult local_fracture_solve(const TransportSystem& subproblem, const Vector& u_f,
                                      const NewtonControls& controls, LinearSolver& linear);

/// u <- Pi_m u + Pi_f^T u_f
Vector inject_update(const Vector& u, const Vector& u_f, const SubdomainMaps& maps);

/// Exact Newton with adaptive nonlinear elimination of the fracture unknowns
/// before the first global iteration. With the preconditioner inactive the
/// iterate sequence is that of newton_solve.
TransportSolution en_ne_solve(const TransportSystem& system, const Vector& u0,
                              const FluxHistory& history, bool after_cut,
                              const NewtonControls& controls, const ActivationConfig& config,
                              LinearSolver& global_linear, LinearSolver& local_linear);

} // namespace fracflow
