#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace segsolve {

/// Scalar grid function over every node of the extended lattice
/// (interior, collar and unused corner nodes alike).
class Field {
public:
    Field() = default;
    explicit Field(std::size_t node_count, double value = 0.0) : values_(node_count, value) {}

    double& operator[](std::size_t node) { return values_[node]; }
    const double& operator[](std::size_t node) const { return values_[node]; }

    std::size_t size() const { return values_.size(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    friend bool operator==(const Field&, const Field&) = default;

private:
    std::vector<double> values_;
};

/// One field per species.
using Species = std::vector<Field>;

/// max |a - b| over all nodes.
double max_abs_difference(const Field& a, const Field& b);
double max_abs_difference(const Species& a, const Species& b);

double max_value(const Field& u);
double min_value(const Field& u);

} // namespace segsolve
