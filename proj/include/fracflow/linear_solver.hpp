#pragma once

#include <Eigen/Sparse>

#include <memory>
#include <string>
#include <vector>

namespace fracflow {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Residual and Jacobian of a nonlinear system at one state.
struct Linearization {
    Vector residual;
    SparseMatrix jacobian;
};

class LinearSolver {
public:
    virtual ~LinearSolver() = default;
    /// Solves a x = b. Returns false when the matrix is singular or the
    /// iteration fails; x is then unspecified.
    virtual bool solve(const SparseMatrix& a, const Vector& b, Vector& x) = 0;
};

/// KLU on the matrix with exact zeros dropped. Upwinded transport Jacobians
/// carry many structural entries that are numerically zero; without them the
/// block triangular form of KLU does most of the work. The symbolic analysis
/// is redone only when the pruned pattern changes.
class SparseDirectSolver final : public LinearSolver {
public:
    SparseDirectSolver();
    ~SparseDirectSolver() override;
    bool solve(const SparseMatrix& a, const Vector& b, Vector& x) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Simplicial sparse LDLT (CHOLMOD, nested dissection ordering) for
/// symmetric positive definite systems such as the pressure equation. Only
/// the lower triangle is read.
class SymmetricDirectSolver final : public LinearSolver {
public:
    SymmetricDirectSolver();
    ~SymmetricDirectSolver() override;
    bool solve(const SparseMatrix& a, const Vector& b, Vector& x) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// BiCGSTAB with an ILUT preconditioner; for systems too large to factor.
class IterativeSolver final : public LinearSolver {
public:
    explicit IterativeSolver(double tolerance = 1e-12, int max_iterations = 500)
        : tolerance_(tolerance), max_iterations_(max_iterations) {}
    bool solve(const SparseMatrix& a, const Vector& b, Vector& x) override;

private:
    double tolerance_;
    int max_iterations_;
};

enum class LinearSolverKind { direct, iterative };

/// `symmetric` selects LDLT for the direct kind and is ignored otherwise.
std::unique_ptr<LinearSolver> make_linear_solver(LinearSolverKind kind, bool symmetric = false);
LinearSolverKind parse_linear_solver_kind(const std::string& name);

/// Triplet accumulator producing a compressed column matrix.
class MatrixBuilder {
public:
    explicit MatrixBuilder(int n, std::size_t reserve = 0) : n_(n) { triplets_.reserve(reserve); }
    void add(int row, int col, double value) { triplets_.emplace_back(row, col, value); }
    SparseMatrix build() const;

private:
    int n_;
    std::vector<Eigen::Triplet<double>> triplets_;
};

} // namespace fracflow
