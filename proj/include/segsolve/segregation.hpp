#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "segsolve/iteration.hpp"

namespace segsolve {

/// sum over lattice edges with at least one interior endpoint of
/// ((u(q) - u(p)) / h)^2 h^d.
double dirichlet_energy(const Field& u, const Domain& domain);

struct FluxProfile {
    double max_abs = 0.0;
    /// (boundary node, |du/dn|) per boundary edge, in domain order.
    std::vector<std::pair<std::size_t, double>> profile;
};

/// One-sided |du/dn| = |u(boundary) - u(interior neighbour)| / h.
FluxProfile boundary_flux(const Field& u, const Domain& domain);

/// sum_x u_i(x) H(u_j)(x) h^d over interior nodes.
double interaction_integral(const Field& u_i, const Field& u_j, const Domain& domain, const KernelSpec& kernel);

/// Minimum distance between interior nodes where u_i > theta and where
/// u_j > theta; +infinity if either set is empty.
double support_distance(const Field& u_i, const Field& u_j, double theta, const Domain& domain);

/// Symmetric Hausdorff distance between the thresholded interior supports;
/// +infinity if exactly one set is empty, 0 if both are.
double support_hausdorff(const Field& a, const Field& b, double theta, const Domain& domain);

/// Collar nodes where the competitor's data exceeds sigma. Throws
/// Error("empty Gamma^sigma") when there are none.
std::vector<std::size_t> competitor_region(const Field& competitor_data, double sigma, const Domain& domain);

struct DecayPoint {
    double r;
    double sup;
    std::size_t nodes;
};

/// For each r, sup of v over interior nodes within distance 1 - r of the
/// region. Radii whose strip holds no interior node are skipped.
std::vector<DecayPoint> decay_profile(const Field& v, const Domain& domain, const std::vector<std::size_t>& region,
                                      const std::vector<double>& radii);

/// Least-squares slope of log(sup) against 1/sqrt(eps).
double decay_slope(const std::vector<std::pair<double, double>>& epsilon_and_sup);

struct FreeBoundaryReport {
    /// Rightmost threshold crossing of u and leftmost crossing of v.
    double x_f = 0.0;
    double v_crossing = 0.0;
    double u_slope = 0.0;
    double v_slope = 0.0;
    double slope_residual = 0.0;
    double affinity_defect = 0.0;
    /// Fraction of overlap nodes where max of v on [x-1, x+1] equals v(x+1)
    /// (and max of u equals u(x-1)).
    double sup_identity_fraction_v = 0.0;
    double sup_identity_fraction_u = 0.0;
    double theta = 0.0;
};

/// Two-species, one-dimensional free-boundary analysis. Species 0 carries
/// the left data, species 1 the right data.
FreeBoundaryReport free_boundary_1d(const Species& fields, const Domain& domain, const KernelSpec& kernel,
                                    double theta);

struct AdjacentReference {
    Field w;
    Field w_plus;
    Field w_minus;
    /// max over sign-changing lattice edges of |D W+ + D W-| (one-sided).
    double slope_mismatch = 0.0;
    double max_slope = 0.0;
    std::size_t interface_edges = 0;
};

/// Limit of the local (adjacent) model: W harmonic with data phi_1 - phi_2.
AdjacentReference adjacent_reference(const Field& phi_1, const Field& phi_2, const Domain& domain,
                                     const LinearSolverOptions& linear = {});

struct SweepRow {
    double epsilon = 0.0;
    std::string status = "ok";
    std::string method;
    std::string message;
    std::vector<double> energy;
    std::vector<double> max_flux;
    /// Ordered pairs (i, j), i != j, row-major.
    std::vector<double> interaction;
    /// Pairs i < j.
    std::vector<double> distance;
    double decay_sup = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    double residual = 0.0;
    double runtime_seconds = 0.0;
};

struct SweepReport {
    std::size_t species = 0;
    double theta = 0.0;
    double sigma = 0.0;
    double decay_r = 0.5;
    std::vector<SweepRow> rows;
    /// Solution at the last successful epsilon.
    std::optional<Solution> last_solution;
};

struct SweepOptions {
    std::vector<double> epsilons;
    /// Support threshold; negative selects 1e-3 * max boundary value.
    double theta = -1.0;
    /// Decay region threshold; negative selects 0.5 * max boundary value.
    double sigma = -1.0;
    double decay_r = 0.5;
    bool warm_start = true;
    MonotoneOptions monotone{};
    FixedPointOptions fixed_point{};
};

/// Solves every epsilon in decreasing order and tabulates diagnostics.
/// Failures are recorded per row; the sweep continues.
SweepReport epsilon_sweep(const Domain& domain, const BoundaryData& boundary, KernelKind kind, double radius,
                          const SweepOptions& options);

} // namespace segsolve
