#include "segsolve/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace segsolve {

double max_abs_difference(const Field& a, const Field& b)
{
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n)
        m = std::max(m, std::abs(a[n] - b[n]));
    return m;
}

double max_abs_difference(const Species& a, const Species& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, max_abs_difference(a[i], b[i]));
    return m;
}

double max_value(const Field& u)
{
    auto v = u.values();
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double min_value(const Field& u)
{
    auto v = u.values();
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

namespace {

// Number of whole spacings in `length`, or -1 if not commensurate.
long whole_steps(double length, double spacing)
{
    const double ratio = length / spacing;
    const long n = std::lround(ratio);
    if (n <= 0 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
        return -1;
    return n;
}

} // namespace

Domain Domain::build(const Box& box, double spacing, const DomainOptions& options)
{
    if (box.dimension != 1 && box.dimension != 2)
        throw Error("domain dimension must be 1 or 2");
    if (!(spacing > 0.0))
        throw Error("grid spacing must be positive");
    if (spacing > options.max_spacing * (1.0 + 1e-12))
        throw Error("collar under-resolved: spacing exceeds " + std::to_string(options.max_spacing));

    Domain d;
    d.box_ = box;
    d.spacing_ = spacing;
    d.collar_width_ = options.collar_width;
    if (box.dimension == 1) {
        d.box_.lower[1] = 0.0;
        d.box_.upper[1] = 0.0;
    }

    // Collar layers reach per-axis distance collar_width + h/2.
    const long layers = static_cast<long>(std::floor(options.collar_width / spacing + 0.5 + 1e-9));
    for (int a = 0; a < box.dimension; ++a) {
        const double side = box.upper[a] - box.lower[a];
        if (!(side > 0.0))
            throw Error("degenerate box");
        const long cells = whole_steps(side, spacing);
        if (cells < 0) {
            std::ostringstream msg;
            msg << "box side " << side << " is not an integer multiple of spacing " << spacing;
            throw Error(msg.str());
        }
        d.extent_[a] = static_cast<std::size_t>(cells + 1 + 2 * layers);
        d.origin_[a] = box.lower[a] - static_cast<double>(layers) * spacing;
    }
    if (box.dimension == 1) {
        d.extent_[1] = 1;
        d.origin_[1] = 0.0;
    }

    const std::size_t count = d.extent_[0] * d.extent_[1];
    d.kinds_.assign(count, NodeKind::outside);
    d.unknown_.assign(count, -1);
    const double tol = 1e-9 * spacing;
    for (std::size_t n = 0; n < count; ++n) {
        const Point p = d.position(n);
        bool inside = true;
        for (int a = 0; a < box.dimension; ++a)
            inside = inside && p[a] > d.box_.lower[a] + tol && p[a] < d.box_.upper[a] - tol;
        if (inside) {
            d.kinds_[n] = NodeKind::interior;
            d.unknown_[n] = static_cast<std::ptrdiff_t>(d.interior_.size());
            d.interior_.push_back(n);
        } else if (d.distance_to_box(p) <= options.collar_width + 0.5 * spacing + tol) {
            d.kinds_[n] = NodeKind::collar;
            d.collar_.push_back(n);
        }
    }
    if (d.interior_.empty())
        throw Error("box contains no interior nodes");

    for (std::size_t n : d.interior_) {
        const auto [i, j] = d.lattice_index(n);
        for (int a = 0; a < box.dimension; ++a) {
            for (int dir : {-1, 1}) {
                const std::size_t nb = a == 0 ? d.node_at(i + dir, j) : d.node_at(i, j + dir);
                if (d.kinds_[nb] == NodeKind::collar)
                    d.boundary_edges_.push_back({n, nb, a, dir});
            }
        }
    }
    return d;
}

double Domain::cell_volume() const
{
    return dimension() == 1 ? spacing_ : spacing_ * spacing_;
}

Point Domain::position(std::size_t node) const
{
    const auto [i, j] = lattice_index(node);
    return {origin_[0] + static_cast<double>(i) * spacing_,
            dimension() == 1 ? 0.0 : origin_[1] + static_cast<double>(j) * spacing_};
}

std::array<long, 2> Domain::lattice_index(std::size_t node) const
{
    return {static_cast<long>(node % extent_[0]), static_cast<long>(node / extent_[0])};
}

std::size_t Domain::node_at(long i, long j) const
{
    return static_cast<std::size_t>(i) + extent_[0] * static_cast<std::size_t>(j);
}

bool Domain::contains_index(long i, long j) const
{
    return i >= 0 && j >= 0 && static_cast<std::size_t>(i) < extent_[0] &&
           static_cast<std::size_t>(j) < extent_[1];
}

std::ptrdiff_t Domain::flat_offset(const LatticeStep& step) const
{
    return static_cast<std::ptrdiff_t>(step[0]) +
           static_cast<std::ptrdiff_t>(extent_[0]) * static_cast<std::ptrdiff_t>(step[1]);
}

double Domain::distance_to_box(const Point& p) const
{
    double s = 0.0;
    for (int a = 0; a < dimension(); ++a) {
        const double g = std::max({box_.lower[a] - p[a], 0.0, p[a] - box_.upper[a]});
        s += g * g;
    }
    return std::sqrt(s);
}

double Domain::distance(std::size_t a, std::size_t b) const
{
    const auto ia = lattice_index(a);
    const auto ib = lattice_index(b);
    const double di = static_cast<double>(ia[0] - ib[0]);
    const double dj = static_cast<double>(ia[1] - ib[1]);
    return spacing_ * std::sqrt(di * di + dj * dj);
}

OffsetSet OffsetSet::ball(int dimension, double spacing, double radius)
{
    if (dimension != 1 && dimension != 2)
        throw Error("offset set dimension must be 1 or 2");
    if (!(spacing > 0.0) || !(radius > 0.0))
        throw Error("offset set needs positive spacing and radius");

    OffsetSet set;
    set.dimension_ = dimension;
    set.spacing_ = spacing;
    set.radius_ = radius;
    set.weight_ = dimension == 1 ? spacing : spacing * spacing;

    // Compare squared lattice norms against (R/h)^2 with a relative guard so
    // that offsets at distance exactly R are kept.
    const double limit = (radius / spacing) * (radius / spacing) * (1.0 + 1e-10);
    const int reach = static_cast<int>(std::floor(radius / spacing + 1e-9));
    const int reach_j = dimension == 2 ? reach : 0;
    for (int j = -reach_j; j <= reach_j; ++j) {
        for (int i = -reach; i <= reach; ++i) {
            if (static_cast<double>(i * i + j * j) <= limit)
                set.steps_.push_back({i, j});
        }
    }
    return set;
}

double BoundaryData::max_value() const
{
    double m = 0.0;
    for (const Field& f : values_)
        m = std::max(m, segsolve::max_value(f));
    return m;
}

void check_separation(const Species& collar_values, const Domain& domain)
{
    const auto collar = domain.collar_nodes();
    std::vector<std::vector<std::size_t>> support(collar_values.size());
    for (std::size_t s = 0; s < collar_values.size(); ++s)
        for (std::size_t n : collar)
            if (collar_values[s][n] > 0.0)
                support[s].push_back(n);

    // Squared distance below 1, measured in lattice units.
    const double one = 1.0 / domain.spacing();
    const double limit = one * one * (1.0 - 1e-10);
    for (std::size_t a = 0; a < support.size(); ++a) {
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            for (std::size_t x : support[a]) {
                const auto ix = domain.lattice_index(x);
                for (std::size_t y : support[b]) {
                    const auto iy = domain.lattice_index(y);
                    const double di = static_cast<double>(ix[0] - iy[0]);
                    const double dj = static_cast<double>(ix[1] - iy[1]);
                    if (di * di + dj * dj < limit) {
                        std::ostringstream msg;
                        msg << "separation violated (" << a << "," << b << "," << x
                            << "): supports closer than 1";
                        throw SeparationError(a, b, x, msg.str());
                    }
                }
            }
        }
    }
}

BoundaryData make_boundary_data(Species collar_values, const Domain& domain)
{
    for (std::size_t s = 0; s < collar_values.size(); ++s) {
        Field& f = collar_values[s];
        if (f.size() != domain.node_count())
            throw Error("boundary field size does not match the domain");
        for (std::size_t n = 0; n < f.size(); ++n) {
            if (domain.kind(n) != NodeKind::collar) {
                f[n] = 0.0;
            } else if (!(f[n] >= 0.0) || !std::isfinite(f[n])) {
                throw Error("boundary data for species " + std::to_string(s) +
                            " is negative or not finite");
            }
        }
    }
    check_separation(collar_values, domain);
    return BoundaryData(std::move(collar_values));
}

BoundaryData make_boundary_data(std::span<const Profile> profiles, const Domain& domain)
{
    Species values;
    values.reserve(profiles.size());
    for (const Profile& phi : profiles) {
        Field f = domain.make_field();
        for (std::size_t n : domain.collar_nodes())
            f[n] = phi(domain.position(n));
        values.push_back(std::move(f));
    }
    return make_boundary_data(std::move(values), domain);
}

} // namespace segsolve
