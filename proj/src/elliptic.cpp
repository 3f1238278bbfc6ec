#include "segsolve/elliptic.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace segsolve {

std::string to_string(LinearMethod method)
{
    return method == LinearMethod::cholesky ? "cholesky" : "cg";
}

LinearMethod linear_method_from_string(const std::string& name)
{
    if (name == "cholesky")
        return LinearMethod::cholesky;
    if (name == "cg")
        return LinearMethod::conjugate_gradient;
    throw Error("unknown linear method '" + name + "'");
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vector = Eigen::VectorXd;

} // namespace

struct ScreenedOperator::Impl {
    // Matrix scaled by h^2: diagonal 2d + h^2 s(x), off-diagonal -1.
    SparseMatrix matrix;
    std::vector<double*> diagonal;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    bool analysed = false;
};

ScreenedOperator::ScreenedOperator(const Domain& domain, LinearSolverOptions options)
    : domain_(&domain), options_(options), impl_(std::make_unique<Impl>())
{
    const auto interior = domain.interior_nodes();
    const auto n = static_cast<int>(interior.size());
    const int d = domain.dimension();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(interior.size() * static_cast<std::size_t>(2 * d + 1));
    for (std::size_t row = 0; row < interior.size(); ++row) {
        const auto [i, j] = domain.lattice_index(interior[row]);
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(row), 2.0 * d);
        for (int a = 0; a < d; ++a) {
            for (int dir : {-1, 1}) {
                const std::size_t nb = a == 0 ? domain.node_at(i + dir, j) : domain.node_at(i, j + dir);
                const std::ptrdiff_t col = domain.unknown_index(nb);
                if (col >= 0)
                    triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), -1.0);
            }
        }
    }
    impl_->matrix.resize(n, n);
    impl_->matrix.setFromTriplets(triplets.begin(), triplets.end());
    impl_->matrix.makeCompressed();
    impl_->diagonal.assign(interior.size(), nullptr);
    for (int col = 0; col < n; ++col)
        for (SparseMatrix::InnerIterator it(impl_->matrix, col); it; ++it)
            if (it.row() == col)
                impl_->diagonal[static_cast<std::size_t>(col)] = &it.valueRef();
}

ScreenedOperator::~ScreenedOperator() = default;
ScreenedOperator::ScreenedOperator(ScreenedOperator&&) noexcept = default;
ScreenedOperator& ScreenedOperator::operator=(ScreenedOperator&&) noexcept = default;

namespace {

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b)
{
    const double bn = b.norm();
    const double rn = (b - a * x).norm();
    return bn > 0.0 ? rn / bn : rn;
}

// Jacobi-preconditioned conjugate gradients from a zero start.
LinearSolveReport conjugate_gradient(const SparseMatrix& a, const Vector& b, Vector& x,
                                     const LinearSolverOptions& options)
{
    LinearSolveReport report;
    report.method = LinearMethod::conjugate_gradient;
    const Vector inv_diag = a.diagonal().cwiseInverse();
    x.setZero(b.size());
    const double bn = b.norm();
    if (bn == 0.0) {
        report.converged = true;
        return report;
    }
    Vector r = b;
    Vector z = inv_diag.cwiseProduct(r);
    Vector p = z;
    double rz = r.dot(z);
    for (int it = 1; it <= options.max_iterations; ++it) {
        const Vector ap = a * p;
        const double alpha = rz / p.dot(ap);
        x += alpha * p;
        r -= alpha * ap;
        report.iterations = it;
        report.relative_residual = r.norm() / bn;
        if (report.relative_residual <= options.tolerance) {
            report.converged = true;
            break;
        }
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    // Recurrence residuals drift; report the true one.
    report.relative_residual = relative_residual(a, x, b);
    report.converged = report.relative_residual <= options.tolerance;
    return report;
}

} // namespace

Field ScreenedOperator::solve(const Field& shift, const Field& dirichlet, const Field* source,
                              LinearSolveReport* report_out)
{
    const Domain& domain = *domain_;
    const auto interior = domain.interior_nodes();
    const int d = domain.dimension();
    const double h2 = domain.spacing() * domain.spacing();

    Vector b(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t row = 0; row < interior.size(); ++row) {
        const std::size_t node = interior[row];
        const double s = shift[node];
        if (!(s >= 0.0) || !std::isfinite(s))
            throw Error("screening coefficient must be finite and nonnegative");
        *impl_->diagonal[row] = 2.0 * d + h2 * s;
        b[static_cast<Eigen::Index>(row)] = source ? h2 * (*source)[node] : 0.0;
    }
    for (const BoundaryEdge& e : domain.boundary_edges())
        b[domain.unknown_index(e.interior)] += dirichlet[e.boundary];

    Vector x;
    LinearSolveReport report;
    report.method = options_.method;
    if (options_.method == LinearMethod::cholesky) {
        if (!impl_->analysed) {
            impl_->ldlt.analyzePattern(impl_->matrix);
            impl_->analysed = true;
        }
        impl_->ldlt.factorize(impl_->matrix);
        if (impl_->ldlt.info() != Eigen::Success)
            throw LinearSolveError("sparse factorization failed", report);
        x = impl_->ldlt.solve(b);
        report.iterations = 1;
        report.relative_residual = relative_residual(impl_->matrix, x, b);
        report.converged = report.relative_residual <= options_.tolerance;
    } else {
        report = conjugate_gradient(impl_->matrix, b, x, options_);
    }
    if (report_out)
        *report_out = report;
    if (!report.converged)
        throw LinearSolveError("linear solve did not reach tolerance (relative residual " +
                                   std::to_string(report.relative_residual) + ")",
                               report);

    Field u = domain.make_field();
    for (std::size_t n : domain.collar_nodes())
        u[n] = dirichlet[n];
    for (std::size_t row = 0; row < interior.size(); ++row)
        u[interior[row]] = x[static_cast<Eigen::Index>(row)];
    return u;
}

Field discrete_laplacian(const Field& u, const Domain& domain)
{
    Field out = domain.make_field();
    const int d = domain.dimension();
    const double inv_h2 = 1.0 / (domain.spacing() * domain.spacing());
    const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(domain.extent()[0]);
    for (std::size_t n : domain.interior_nodes()) {
        const double* p = &u[n];
        double sum = p[-1] + p[1];
        if (d == 2)
            sum += p[-row] + p[row];
        out[n] = (sum - 2.0 * d * p[0]) * inv_h2;
    }
    return out;
}

Field harmonic_extension(const Field& boundary, const Domain& domain, const LinearSolverOptions& options,
                         LinearSolveReport* report)
{
    ScreenedOperator op(domain, options);
    return op.solve(domain.make_field(), boundary, nullptr, report);
}

ScreenedSolution screened_solve(const Field& c, const Field& boundary, const Domain& domain,
                                const LinearSolverOptions& options)
{
    if (!(options.tolerance > 0.0))
        throw Error("linear tolerance must be positive");
    ScreenedOperator op(domain, options);
    ScreenedSolution out;
    out.field = op.solve(c, boundary, nullptr, &out.report);
    return out;
}

double boundary_flux_total(const Field& u, const Domain& domain)
{
    const double h = domain.spacing();
    const double face = domain.dimension() == 1 ? 1.0 : h;
    double sum = 0.0;
    for (const BoundaryEdge& e : domain.boundary_edges())
        sum += (u[e.boundary] - u[e.interior]) / h * face;
    return sum;
}

} // namespace segsolve
