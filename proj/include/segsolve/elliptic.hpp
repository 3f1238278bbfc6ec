#pragma once

#include <memory>
#include <string>

#include "segsolve/domain.hpp"

namespace segsolve {

enum class LinearMethod {
    cholesky,          ///< sparse LDL^T factorization
    conjugate_gradient ///< Jacobi-preconditioned CG
};

std::string to_string(LinearMethod method);
LinearMethod linear_method_from_string(const std::string& name);

struct LinearSolverOptions {
    LinearMethod method = LinearMethod::cholesky;
    /// Relative residual ||b - A u|| / ||b|| accepted as converged.
    double tolerance = 1e-10;
    int max_iterations = 20000;
};

struct LinearSolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
    LinearMethod method = LinearMethod::cholesky;
    bool converged = false;
};

class LinearSolveError : public Error {
public:
    LinearSolveError(const std::string& what, LinearSolveReport report) : Error(what), report(report) {}
    LinearSolveReport report;
};

/// Solver for the Dirichlet problem (-Delta_h + s(x)) u = f at interior
/// nodes with u prescribed on the collar. The sparsity pattern is analysed
/// once; each solve refactorizes for the current shift s >= 0.
///
/// Holds a pointer to the domain, which must outlive the operator. Not
/// thread-safe; use one instance per worker.
class ScreenedOperator {
public:
    explicit ScreenedOperator(const Domain& domain, LinearSolverOptions options = {});
    ~ScreenedOperator();
    ScreenedOperator(ScreenedOperator&&) noexcept;
    ScreenedOperator& operator=(ScreenedOperator&&) noexcept;

    /// `shift` and `source` are read at interior nodes; `source` may be null.
    /// The returned field copies `dirichlet` on collar nodes.
    Field solve(const Field& shift, const Field& dirichlet, const Field* source,
                LinearSolveReport* report = nullptr);

    const LinearSolverOptions& options() const { return options_; }

private:
    struct Impl;
    const Domain* domain_;
    LinearSolverOptions options_;
    std::unique_ptr<Impl> impl_;
};

/// (sum of axis neighbours - 2d u(x)) / h^2 at interior nodes; zero elsewhere.
Field discrete_laplacian(const Field& u, const Domain& domain);

Field harmonic_extension(const Field& boundary, const Domain& domain,
                         const LinearSolverOptions& options = {},
                         LinearSolveReport* report = nullptr);

struct ScreenedSolution {
    Field field;
    LinearSolveReport report;
};

/// Solves Delta u = c u in Omega, u = boundary on the collar.
ScreenedSolution screened_solve(const Field& c, const Field& boundary, const Domain& domain,
                                const LinearSolverOptions& options = {});

/// Net discrete outward flux: sum over boundary edges of
/// (u(boundary) - u(interior)) / h * h^(d-1). Equals h^d * sum of the
/// discrete Laplacian over interior nodes.
double boundary_flux_total(const Field& u, const Domain& domain);

} // namespace segsolve
