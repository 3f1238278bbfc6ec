#include "segsolve/segregation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace segsolve {

double dirichlet_energy(const Field& u, const Domain& domain)
{
    const double h = domain.spacing();
    const double vol = domain.cell_volume();
    const auto [nx, ny] = domain.extent();
    double sum = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t p = domain.node_at(static_cast<long>(i), static_cast<long>(j));
            for (int a = 0; a < domain.dimension(); ++a) {
                const long ni = static_cast<long>(i) + (a == 0 ? 1 : 0);
                const long nj = static_cast<long>(j) + (a == 1 ? 1 : 0);
                if (!domain.contains_index(ni, nj))
                    continue;
                const std::size_t q = domain.node_at(ni, nj);
                if (domain.kind(p) != NodeKind::interior && domain.kind(q) != NodeKind::interior)
                    continue;
                const double g = (u[q] - u[p]) / h;
                sum += g * g * vol;
            }
        }
    }
    return sum;
}

FluxProfile boundary_flux(const Field& u, const Domain& domain)
{
    FluxProfile out;
    const double h = domain.spacing();
    for (const BoundaryEdge& e : domain.boundary_edges()) {
        const double g = std::abs(u[e.boundary] - u[e.interior]) / h;
        out.profile.emplace_back(e.boundary, g);
        out.max_abs = std::max(out.max_abs, g);
    }
    return out;
}

double interaction_integral(const Field& u_i, const Field& u_j, const Domain& domain, const KernelSpec& kernel)
{
    const Field h = apply_kernel(u_j, domain, kernel);
    double sum = 0.0;
    for (std::size_t n : domain.interior_nodes())
        sum += u_i[n] * h[n];
    return sum * domain.cell_volume();
}

namespace {

std::vector<std::size_t> above(const Field& u, double theta, const Domain& domain)
{
    std::vector<std::size_t> out;
    for (std::size_t n : domain.interior_nodes())
        if (u[n] > theta)
            out.push_back(n);
    return out;
}

double min_distance_to_set(std::size_t x, const std::vector<std::size_t>& set, const Domain& domain)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t y : set)
        best = std::min(best, domain.distance(x, y));
    return best;
}

} // namespace

double support_distance(const Field& u_i, const Field& u_j, double theta, const Domain& domain)
{
    if (!(theta > 0.0))
        throw Error("support threshold must be positive");
    const auto a = above(u_i, theta, domain);
    const auto b = above(u_j, theta, domain);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x : a)
        best = std::min(best, min_distance_to_set(x, b, domain));
    return best;
}

double support_hausdorff(const Field& u, const Field& w, double theta, const Domain& domain)
{
    const auto a = above(u, theta, domain);
    const auto b = above(w, theta, domain);
    if (a.empty() && b.empty())
        return 0.0;
    if (a.empty() || b.empty())
        return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (std::size_t x : a)
        d = std::max(d, min_distance_to_set(x, b, domain));
    for (std::size_t y : b)
        d = std::max(d, min_distance_to_set(y, a, domain));
    return d;
}

std::vector<std::size_t> competitor_region(const Field& competitor_data, double sigma, const Domain& domain)
{
    std::vector<std::size_t> region;
    for (std::size_t n : domain.collar_nodes())
        if (competitor_data[n] > sigma)
            region.push_back(n);
    if (region.empty())
        throw Error("empty Gamma^sigma: no collar node exceeds sigma");
    return region;
}

std::vector<DecayPoint> decay_profile(const Field& v, const Domain& domain, const std::vector<std::size_t>& region,
                                      const std::vector<double>& radii)
{
    if (region.empty())
        throw Error("empty Gamma^sigma: no collar node exceeds sigma");
    std::vector<double> dist;
    dist.reserve(domain.interior_nodes().size());
    for (std::size_t n : domain.interior_nodes())
        dist.push_back(min_distance_to_set(n, region, domain));

    std::vector<DecayPoint> out;
    const auto interior = domain.interior_nodes();
    for (double r : radii) {
        if (!(r > 0.0 && r < 1.0))
            throw Error("decay radius must lie in (0, 1)");
        DecayPoint p{r, 0.0, 0};
        for (std::size_t q = 0; q < interior.size(); ++q) {
            if (dist[q] <= 1.0 - r + 1e-12) {
                p.sup = std::max(p.sup, v[interior[q]]);
                ++p.nodes;
            }
        }
        if (p.nodes > 0)
            out.push_back(p);
    }
    return out;
}

double decay_slope(const std::vector<std::pair<double, double>>& epsilon_and_sup)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double n = 0.0;
    for (const auto& [eps, sup] : epsilon_and_sup) {
        if (!(sup > 0.0) || !(eps > 0.0))
            continue;
        const double x = 1.0 / std::sqrt(eps);
        const double y = std::log(sup);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1.0;
    }
    const double den = n * sxx - sx * sx;
    if (n < 2.0 || den == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / den;
}

FreeBoundaryReport free_boundary_1d(const Species& fields, const Domain& domain, const KernelSpec& kernel,
                                    double theta)
{
    if (domain.dimension() != 1)
        throw Error("free-boundary analysis requires d = 1");
    if (fields.size() != 2)
        throw Error("free-boundary analysis requires two species");
    if (!(theta > 0.0))
        throw Error("support threshold must be positive");
    const Field& u = fields[0];
    const Field& v = fields[1];
    const double h = domain.spacing();
    const auto interior = domain.interior_nodes();
    const std::size_t first = interior.front();
    const std::size_t last = interior.back();

    FreeBoundaryReport r;
    r.theta = theta;

    // Rightmost crossing of u, leftmost crossing of v.
    std::optional<std::size_t> iu;
    for (std::size_t n = last + 1; n-- > first;)
        if (u[n] > theta && u[n + 1] <= theta) {
            iu = n;
            break;
        }
    std::optional<std::size_t> iv;
    for (std::size_t n = first; n <= last; ++n)
        if (v[n] > theta && v[n - 1] <= theta) {
            iv = n;
            break;
        }
    if (!iu || !iv)
        throw Error("no crossing: no threshold crossing of the support found");

    const double xu = domain.position(*iu)[0];
    r.x_f = xu + h * (u[*iu] - theta) / (u[*iu] - u[*iu + 1]);
    const double xv = domain.position(*iv)[0];
    r.v_crossing = xv - h * (v[*iv] - theta) / (v[*iv] - v[*iv - 1]);

    // One-sided second-order slopes from inside each support.
    const std::size_t a = *iu;
    r.u_slope = (3.0 * u[a] - 4.0 * u[a - 1] + u[a - 2]) / (2.0 * h);
    const long steps = std::lround(1.0 / h);
    const double target = r.x_f + 1.0;
    std::size_t b = a + static_cast<std::size_t>(steps);
    while (domain.position(b)[0] < target - 1e-12)
        ++b;
    if (b + 2 >= domain.node_count())
        throw Error("free boundary too close to the right end for a one-sided slope");
    r.v_slope = (-3.0 * v[b] + 4.0 * v[b + 1] - v[b + 2]) / (2.0 * h);
    r.slope_residual = std::abs(r.u_slope + r.v_slope);

    // Overlap where x and x + 1 are both interior.
    const Field hu = apply_kernel(u, domain, kernel);
    const Field hv = apply_kernel(v, domain, kernel);
    const double inv_h2 = 1.0 / (h * h);
    std::size_t overlap = 0, match_v = 0, match_u = 0;
    for (std::size_t x = first; x + static_cast<std::size_t>(steps) <= last; ++x) {
        const std::size_t y = x + static_cast<std::size_t>(steps);
        const double d2 = (u[x + 1] - 2.0 * u[x] + u[x - 1]) * inv_h2 - (v[y + 1] - 2.0 * v[y] + v[y - 1]) * inv_h2;
        r.affinity_defect = std::max(r.affinity_defect, std::abs(d2));
        ++overlap;
        if (kernel.kind() == KernelKind::sup) {
            if (std::abs(hv[x] - v[y]) <= 1e-14 * std::max(1.0, std::abs(v[y])))
                ++match_v;
            if (std::abs(hu[y] - u[x]) <= 1e-14 * std::max(1.0, std::abs(u[x])))
                ++match_u;
        }
    }
    if (overlap > 0) {
        r.sup_identity_fraction_v = static_cast<double>(match_v) / static_cast<double>(overlap);
        r.sup_identity_fraction_u = static_cast<double>(match_u) / static_cast<double>(overlap);
    }
    return r;
}

AdjacentReference adjacent_reference(const Field& phi_1, const Field& phi_2, const Domain& domain,
                                     const LinearSolverOptions& linear)
{
    Field data = domain.make_field();
    for (std::size_t n : domain.collar_nodes())
        data[n] = phi_1[n] - phi_2[n];
    AdjacentReference ref;
    ref.w = harmonic_extension(data, domain, linear);
    ref.w_plus = ref.w;
    ref.w_minus = ref.w;
    for (std::size_t n = 0; n < ref.w.size(); ++n) {
        ref.w_plus[n] = std::max(ref.w[n], 0.0);
        ref.w_minus[n] = std::max(-ref.w[n], 0.0);
    }

    const double h = domain.spacing();
    for (std::size_t p : domain.interior_nodes()) {
        const auto [i, j] = domain.lattice_index(p);
        for (int a = 0; a < domain.dimension(); ++a) {
            for (int dir : {-1, 1}) {
                const long di = a == 0 ? dir : 0;
                const long dj = a == 1 ? dir : 0;
                if (!domain.contains_index(i + 2 * di, j + 2 * dj) || !domain.contains_index(i - di, j - dj))
                    continue;
                const std::size_t q = domain.node_at(i + di, j + dj);
                if (!(ref.w[p] > 0.0 && ref.w[q] <= 0.0))
                    continue;
                const std::size_t p_in = domain.node_at(i - di, j - dj);
                const std::size_t q_out = domain.node_at(i + 2 * di, j + 2 * dj);
                if (domain.kind(p_in) == NodeKind::outside || domain.kind(q_out) == NodeKind::outside)
                    continue;
                // Derivatives along +dir, taken from each side of the interface.
                const double plus = (ref.w_plus[p] - ref.w_plus[p_in]) / h;
                const double minus = (ref.w_minus[q_out] - ref.w_minus[q]) / h;
                ref.slope_mismatch = std::max(ref.slope_mismatch, std::abs(plus + minus));
                ref.max_slope = std::max(ref.max_slope, std::abs(plus));
                ++ref.interface_edges;
            }
        }
    }
    return ref;
}

SweepReport epsilon_sweep(const Domain& domain, const BoundaryData& boundary, KernelKind kind, double radius,
                          const SweepOptions& options)
{
    if (options.epsilons.empty())
        throw Error("epsilon list is empty");
    for (std::size_t q = 0; q < options.epsilons.size(); ++q) {
        if (!(options.epsilons[q] > 0.0))
            throw Error("epsilon values must be positive");
        if (q > 0 && !(options.epsilons[q] < options.epsilons[q - 1]))
            throw Error("epsilon list must be strictly decreasing");
    }

    const std::size_t m = boundary.species_count();
    const double scale = boundary.max_value();
    SweepReport report;
    report.species = m;
    report.theta = options.theta > 0.0 ? options.theta : 1e-3 * (scale > 0.0 ? scale : 1.0);
    report.sigma = options.sigma > 0.0 ? options.sigma : 0.5 * scale;
    report.decay_r = options.decay_r;

    const KernelSpec kernel(kind, domain, radius);
    std::optional<Species> warm;
    for (double eps : options.epsilons) {
        SweepRow row;
        row.epsilon = eps;
        const auto start = std::chrono::steady_clock::now();
        const Problem problem{domain, boundary, kernel, eps};
        std::optional<Solution> sol;
        if (options.warm_start && warm) {
            try {
                sol = solve_fixed_point(problem, *warm, options.fixed_point);
            } catch (const Error& e) {
                row.message = std::string("warm start failed: ") + e.what();
            }
        }
        if (!sol) {
            try {
                sol = run_monotone(problem, options.monotone).solution;
            } catch (const Error& e) {
                row.status = "failed";
                row.message += (row.message.empty() ? "" : "; ") + std::string(e.what());
            }
        }
        row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (sol) {
            row.method = sol->method;
            row.iterations = sol->iterations;
            row.residual = sol->residual.scaled;
            for (std::size_t i = 0; i < m; ++i) {
                row.energy.push_back(dirichlet_energy(sol->fields[i], domain));
                row.max_flux.push_back(boundary_flux(sol->fields[i], domain).max_abs);
            }
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    if (i != j)
                        row.interaction.push_back(interaction_integral(sol->fields[i], sol->fields[j], domain, kernel));
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = i + 1; j < m; ++j)
                    row.distance.push_back(support_distance(sol->fields[i], sol->fields[j], report.theta, domain));
            if (m >= 2) {
                try {
                    const auto region = competitor_region(boundary.species(0), report.sigma, domain);
                    const auto profile = decay_profile(sol->fields[1], domain, region, {options.decay_r});
                    if (!profile.empty())
                        row.decay_sup = profile.front().sup;
                } catch (const Error&) {
                    // No competitor region above sigma: decay column stays NaN.
                }
            }
            warm = sol->fields;
            report.last_solution = std::move(*sol);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace segsolve
