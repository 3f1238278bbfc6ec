#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "segsolve/domain.hpp"

namespace segsolve {

/// Text dump of one field over the whole extended lattice. The header lists
/// dimension, lower and upper corners of the box, spacing and lattice extent;
/// values follow one lattice row per line, first axis fastest.
void write_grid(std::ostream& out, const Field& field, const Domain& domain);
void write_grid(const std::string& path, const Field& field, const Domain& domain);

struct GridFile {
    int dimension = 0;
    Point lower{0.0, 0.0};
    Point upper{0.0, 0.0};
    double spacing = 0.0;
    std::array<std::size_t, 2> extent{0, 0};
    std::vector<double> values;
};

GridFile read_grid(std::istream& in);
GridFile read_grid(const std::string& path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

} // namespace segsolve
