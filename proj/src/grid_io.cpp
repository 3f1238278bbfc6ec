#include "segsolve/grid_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace segsolve {

std::string format_double(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_grid(std::ostream& out, const Field& field, const Domain& domain)
{
    if (field.size() != domain.node_count())
        throw Error("grid field size does not match the domain");
    const Box& box = domain.box();
    const int d = domain.dimension();
    const auto ext = domain.extent();
    out << "# segsolve grid\n";
    out << "dimension " << d << '\n';
    out << "lower";
    for (int a = 0; a < d; ++a)
        out << ' ' << format_double(box.lower[a]);
    out << "\nupper";
    for (int a = 0; a < d; ++a)
        out << ' ' << format_double(box.upper[a]);
    out << "\nspacing " << format_double(domain.spacing()) << '\n';
    out << "extent " << ext[0];
    if (d == 2)
        out << ' ' << ext[1];
    out << "\nvalues\n";
    for (std::size_t j = 0; j < ext[1]; ++j) {
        for (std::size_t i = 0; i < ext[0]; ++i)
            out << (i ? " " : "") << format_double(field[j * ext[0] + i]);
        out << '\n';
    }
}

void write_grid(const std::string& path, const Field& field, const Domain& domain)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path + " for writing");
    write_grid(out, field, domain);
    if (!out)
        throw Error("failed writing " + path);
}

GridFile read_grid(std::istream& in)
{
    GridFile g;
    std::string line;
    auto expect = [&](const std::string& key) -> std::istringstream {
        while (std::getline(in, line))
            if (!line.empty() && line[0] != '#')
                break;
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k != key)
            throw Error("grid file: expected '" + key + "', got '" + line + "'");
        return ls;
    };
    expect("dimension") >> g.dimension;
    if (g.dimension != 1 && g.dimension != 2)
        throw Error("grid file: bad dimension");
    {
        auto ls = expect("lower");
        for (int a = 0; a < g.dimension; ++a)
            ls >> g.lower[a];
    }
    {
        auto ls = expect("upper");
        for (int a = 0; a < g.dimension; ++a)
            ls >> g.upper[a];
    }
    expect("spacing") >> g.spacing;
    {
        auto ls = expect("extent");
        ls >> g.extent[0];
        g.extent[1] = 1;
        if (g.dimension == 2)
            ls >> g.extent[1];
    }
    expect("values");
    const std::size_t count = g.extent[0] * g.extent[1];
    g.values.reserve(count);
    std::string tok;
    while (g.values.size() < count && in >> tok) {
        if (tok == "inf")
            g.values.push_back(INFINITY);
        else if (tok == "-inf")
            g.values.push_back(-INFINITY);
        else if (tok == "nan")
            g.values.push_back(NAN);
        else
            g.values.push_back(std::stod(tok));
    }
    if (g.values.size() != count)
        throw Error("grid file: truncated value block");
    return g;
}

GridFile read_grid(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    return read_grid(in);
}

} // namespace segsolve
