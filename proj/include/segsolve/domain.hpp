#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "segsolve/field.hpp"

namespace segsolve {

/// Base class for recoverable input / solver failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Point = std::array<double, 2>;
using LatticeStep = std::array<int, 2>;

/// Axis-aligned box Omega in one or two dimensions. The second coordinate
/// is ignored when dimension == 1.
struct Box {
    int dimension = 1;
    Point lower{0.0, 0.0};
    Point upper{1.0, 0.0};
};

enum class NodeKind : std::uint8_t { interior, collar, outside };

struct DomainOptions {
    /// Coarsest spacing accepted; the width-1 collar needs a few nodes across.
    double max_spacing = 0.25;
    double collar_width = 1.0;
};

/// A lattice edge that crosses the boundary: `interior` lies in Omega,
/// `boundary` is its neighbour on the box face along `axis`. `direction`
/// is +1 when the boundary node lies in the positive axis direction.
struct BoundaryEdge {
    std::size_t interior;
    std::size_t boundary;
    int axis;
    int direction;
};

/// Uniform lattice covering Omega plus the exterior collar of points within
/// collar_width of the box. Immutable once built.
class Domain {
public:
    static Domain build(const Box& box, double spacing, const DomainOptions& options = {});

    int dimension() const { return box_.dimension; }
    const Box& box() const { return box_; }
    double spacing() const { return spacing_; }
    double collar_width() const { return collar_width_; }
    /// h^d, the quadrature weight of a single node.
    double cell_volume() const;

    /// Nodes per axis of the extended lattice (second entry is 1 in 1D).
    std::array<std::size_t, 2> extent() const { return extent_; }
    std::size_t node_count() const { return kinds_.size(); }
    /// Coordinates of lattice node (0, 0).
    Point origin() const { return origin_; }

    NodeKind kind(std::size_t node) const { return kinds_[node]; }
    Point position(std::size_t node) const;
    std::array<long, 2> lattice_index(std::size_t node) const;
    std::size_t node_at(long i, long j = 0) const;
    bool contains_index(long i, long j = 0) const;
    /// Flat-index displacement of a lattice step.
    std::ptrdiff_t flat_offset(const LatticeStep& step) const;

    std::span<const std::size_t> interior_nodes() const { return interior_; }
    std::span<const std::size_t> collar_nodes() const { return collar_; }
    /// Position of `node` among interior_nodes(), or -1 for non-interior nodes.
    std::ptrdiff_t unknown_index(std::size_t node) const { return unknown_[node]; }
    std::span<const BoundaryEdge> boundary_edges() const { return boundary_edges_; }

    /// Euclidean distance from p to the closed box.
    double distance_to_box(const Point& p) const;
    double distance(std::size_t a, std::size_t b) const;

    Field make_field(double value = 0.0) const { return Field(node_count(), value); }

private:
    Domain() = default;

    Box box_;
    double spacing_ = 0.0;
    double collar_width_ = 1.0;
    Point origin_{0.0, 0.0};
    std::array<std::size_t, 2> extent_{0, 1};
    std::vector<NodeKind> kinds_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> collar_;
    std::vector<std::ptrdiff_t> unknown_;
    std::vector<BoundaryEdge> boundary_edges_;
};

/// Lattice offsets inside the closed ball of radius R, with quadrature
/// weight h^d. Ordered lexicographically by (second, first) step.
class OffsetSet {
public:
    static OffsetSet ball(int dimension, double spacing, double radius);

    int dimension() const { return dimension_; }
    double spacing() const { return spacing_; }
    double radius() const { return radius_; }
    double weight() const { return weight_; }
    std::span<const LatticeStep> steps() const { return steps_; }
    std::size_t size() const { return steps_.size(); }

private:
    int dimension_ = 1;
    double spacing_ = 0.0;
    double radius_ = 0.0;
    double weight_ = 0.0;
    std::vector<LatticeStep> steps_;
};

class SeparationError : public Error {
public:
    SeparationError(std::size_t species_i, std::size_t species_j, std::size_t node, const std::string& what)
        : Error(what), species_i(species_i), species_j(species_j), node(node) {}
    std::size_t species_i;
    std::size_t species_j;
    std::size_t node;
};

using Profile = std::function<double(const Point&)>;

/// Dirichlet data of every species on the collar. Interior entries are zero.
class BoundaryData {
public:
    BoundaryData() = default;
    explicit BoundaryData(Species values) : values_(std::move(values)) {}

    std::size_t species_count() const { return values_.size(); }
    const Field& species(std::size_t i) const { return values_[i]; }
    const Species& all() const { return values_; }
    /// max over species and collar nodes.
    double max_value() const;

private:
    Species values_;
};

/// Samples each profile on the collar and verifies nonnegativity and the
/// pairwise distance-one separation of supports.
BoundaryData make_boundary_data(std::span<const Profile> profiles, const Domain& domain);

/// Wraps pre-sampled collar values. Runs the same validation as
/// make_boundary_data.
BoundaryData make_boundary_data(Species collar_values, const Domain& domain);

/// Throws SeparationError if a collar node with phi_i > 0 lies at distance
/// < 1 of the support of phi_j, i != j.
void check_separation(const Species& collar_values, const Domain& domain);

} // namespace segsolve
