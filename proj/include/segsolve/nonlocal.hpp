#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "segsolve/domain.hpp"

namespace segsolve {

enum class KernelKind {
    integral, ///< H(u)(x) = integral of u over the closed ball B_R(x)
    sup       ///< H(u)(x) = max of u over the closed ball B_R(x)
};

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Nonlocal operator bound to a domain lattice: the ball offsets and their
/// flat-index displacements. Construction verifies that every interior node
/// sees only interior or collar nodes through the stencil.
class KernelSpec {
public:
    KernelSpec(KernelKind kind, const Domain& domain, double radius = 1.0);

    KernelKind kind() const { return kind_; }
    double radius() const { return offsets_.radius(); }
    const OffsetSet& offsets() const { return offsets_; }
    std::span<const std::ptrdiff_t> flat_offsets() const { return flat_; }

private:
    KernelKind kind_;
    OffsetSet offsets_;
    std::vector<std::ptrdiff_t> flat_;
};

/// H(u) at every interior node; zero elsewhere.
Field apply_kernel(const Field& u, const Domain& domain, const KernelSpec& kernel);

/// c_i = (1/eps) * sum_{j != i} H(u_j), at interior nodes.
Field interaction_coefficient(const Species& state, std::size_t i, double epsilon,
                              const Domain& domain, const KernelSpec& kernel);

/// Same as above from precomputed H(u_j) fields.
Field interaction_coefficient_from(std::span<const Field> kernel_values, std::size_t i,
                                   double epsilon, const Domain& domain);

} // namespace segsolve
