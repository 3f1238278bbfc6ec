#pragma once

// Reference computations for the tests. They share no code with the solver
// beyond reading node positions from a Domain: neighbours, balls, matrices
// and kernels are all rebuilt here from coordinates.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "segsolve/domain.hpp"
#include "segsolve/nonlocal.hpp"

namespace oracle {

using segsolve::Field;
using segsolve::Point;
using segsolve::Species;

/// Independent view of a domain's nodes, classified from coordinates alone.
struct Lattice {
    explicit Lattice(const segsolve::Domain& domain);

    int dim;
    double h;
    segsolve::Box box;
    std::vector<Point> pos;
    std::vector<bool> inside;
    std::vector<std::size_t> interior;
    std::map<std::array<long, 2>, std::size_t> by_coord;

    std::array<long, 2> coord(std::size_t n) const;
    std::optional<std::size_t> at(long i, long j) const;
    /// Interior node -> row number, -1 otherwise.
    std::vector<long> row;
};

/// Lattice steps with |step| h <= R, by floating-point distance.
std::vector<std::array<int, 2>> brute_ball(int dim, double h, double radius);

/// Kernel applied by comparing every interior node with every node.
Field brute_kernel(const Field& u, const segsolve::Domain& domain, segsolve::KernelKind kind, double radius);

/// (-Delta_h + shift) u = source inside, u = dirichlet elsewhere, assembled as
/// a dense matrix and solved by Gaussian elimination with partial pivoting.
Field dense_screened_solve(const segsolve::Domain& domain, const Field& shift, const Field& dirichlet,
                           const Field* source = nullptr);

struct NewtonResult {
    Species fields;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Full Newton on the coupled discrete system with the integral kernel:
/// -Delta_h u_i + (1/eps) u_i sum_{j != i} H(u_j) = 0, collar fixed to the
/// boundary data. Dense Jacobian, backtracking line search.
NewtonResult newton_solve(const segsolve::Domain& domain, const Species& boundary, double epsilon, double radius,
                          int max_iterations = 60);

/// cosh(sqrt(c) x) in 1D, cosh(a x) cosh(b y) with a^2 + b^2 = c in 2D.
double cosh_exact(const Point& p, int dim, double a, double b);

} // namespace oracle
