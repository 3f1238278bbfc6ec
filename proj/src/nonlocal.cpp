#include "segsolve/nonlocal.hpp"

#include <algorithm>
#include <stdexcept>

namespace segsolve {

std::string to_string(KernelKind kind)
{
    return kind == KernelKind::integral ? "integral" : "sup";
}

KernelKind kernel_kind_from_string(const std::string& name)
{
    if (name == "integral")
        return KernelKind::integral;
    if (name == "sup")
        return KernelKind::sup;
    throw Error("unknown kernel variant '" + name + "'");
}

KernelSpec::KernelSpec(KernelKind kind, const Domain& domain, double radius)
    : kind_(kind), offsets_(OffsetSet::ball(domain.dimension(), domain.spacing(), radius))
{
    if (radius / domain.spacing() < 2.0 - 1e-9)
        throw Error("kernel radius must span at least two grid spacings");
    if (radius > domain.collar_width() + 1e-12)
        throw Error("kernel radius exceeds the collar width");

    flat_.reserve(offsets_.size());
    for (const LatticeStep& s : offsets_.steps())
        flat_.push_back(domain.flat_offset(s));

    for (std::size_t n : domain.interior_nodes()) {
        const auto [i, j] = domain.lattice_index(n);
        for (const LatticeStep& s : offsets_.steps()) {
            if (!domain.contains_index(i + s[0], j + s[1]) ||
                domain.kind(domain.node_at(i + s[0], j + s[1])) == NodeKind::outside)
                throw std::logic_error("kernel stencil leaves the collar: domain is inconsistent");
        }
    }
}

Field apply_kernel(const Field& u, const Domain& domain, const KernelSpec& kernel)
{
    Field out = domain.make_field();
    const auto offsets = kernel.flat_offsets();
    const double weight = kernel.offsets().weight();
    for (std::size_t n : domain.interior_nodes()) {
        const double* base = &u[n];
        if (kernel.kind() == KernelKind::integral) {
            double sum = 0.0;
            for (std::ptrdiff_t off : offsets)
                sum += base[off];
            out[n] = sum * weight;
        } else {
            double m = base[offsets.front()];
            for (std::ptrdiff_t off : offsets)
                m = std::max(m, base[off]);
            out[n] = m;
        }
    }
    return out;
}

Field interaction_coefficient_from(std::span<const Field> kernel_values, std::size_t i,
                                   double epsilon, const Domain& domain)
{
    if (!(epsilon > 0.0))
        throw Error("epsilon must be positive");
    Field c = domain.make_field();
    for (std::size_t j = 0; j < kernel_values.size(); ++j) {
        if (j == i)
            continue;
        for (std::size_t n : domain.interior_nodes())
            c[n] += kernel_values[j][n];
    }
    for (std::size_t n : domain.interior_nodes())
        c[n] /= epsilon;
    return c;
}

Field interaction_coefficient(const Species& state, std::size_t i, double epsilon,
                              const Domain& domain, const KernelSpec& kernel)
{
    if (!(epsilon > 0.0))
        throw Error("epsilon must be positive");
    std::vector<Field> h(state.size());
    for (std::size_t j = 0; j < state.size(); ++j)
        if (j != i)
            h[j] = apply_kernel(state[j], domain, kernel);
        else
            h[j] = domain.make_field();
    return interaction_coefficient_from(h, i, epsilon, domain);
}

} // namespace segsolve
