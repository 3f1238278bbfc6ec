#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "segsolve/domain.hpp"

using namespace segsolve;

namespace {

Box box1(double lo, double hi) { return Box{1, {lo, 0.0}, {hi, 0.0}}; }
Box box2(double lo, double hi) { return Box{2, {lo, lo}, {hi, hi}}; }

DomainOptions coarse()
{
    DomainOptions o;
    o.max_spacing = 0.5;
    return o;
}

std::vector<double> positions_of(const Domain& d, std::span<const std::size_t> nodes)
{
    std::vector<double> out;
    for (std::size_t n : nodes)
        out.push_back(d.position(n)[0]);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("1D classification at h = 0.5")
{
    const Domain d = Domain::build(box1(-2, 2), 0.5, coarse());
    CHECK(positions_of(d, d.interior_nodes()) == std::vector<double>{-1.5, -1, -0.5, 0, 0.5, 1, 1.5});
    CHECK(positions_of(d, d.collar_nodes()) == std::vector<double>{-3, -2.5, -2, 2, 2.5, 3});
    CHECK(d.node_count() == 13);
}

TEST_CASE("spacing rules")
{
    CHECK_THROWS_WITH_AS(Domain::build(box1(-2, 2), 0.5), doctest::Contains("collar under-resolved"), Error);
    CHECK_THROWS_WITH_AS(Domain::build(box1(-2, 2), 0.3, coarse()), doctest::Contains("integer multiple"), Error);
    CHECK_THROWS_AS(Domain::build(box1(-2, 2), -0.1), Error);
    CHECK_THROWS_AS(Domain::build(box1(1, 1), 0.25), Error);
    CHECK_NOTHROW(Domain::build(box1(-2, 2), 0.25));
}

TEST_CASE("classification invariants in 2D")
{
    const Domain d = Domain::build(box2(0, 3), 0.25);
    const Box& b = d.box();
    for (std::size_t n = 0; n < d.node_count(); ++n) {
        const Point p = d.position(n);
        const bool open = p[0] > b.lower[0] && p[0] < b.upper[0] && p[1] > b.lower[1] && p[1] < b.upper[1];
        if (d.kind(n) == NodeKind::interior)
            CHECK(open);
        if (d.kind(n) == NodeKind::collar) {
            CHECK_FALSE(open);
            CHECK(d.distance_to_box(p) <= 1.0 + d.spacing() / 2 + 1e-12);
        }
        if (d.kind(n) == NodeKind::outside)
            CHECK(d.distance_to_box(p) > 1.0);
    }
}

TEST_CASE("collar covers every unit ball")
{
    for (double h : {0.25, 0.125, 0.1}) {
        const Domain d = Domain::build(box2(0, 3), h);
        const OffsetSet ball = OffsetSet::ball(2, h, 1.0);
        std::size_t outside = 0;
        for (std::size_t x : d.interior_nodes()) {
            const auto ix = d.lattice_index(x);
            for (const auto& s : ball.steps()) {
                if (!d.contains_index(ix[0] + s[0], ix[1] + s[1])) {
                    ++outside;
                    continue;
                }
                if (d.kind(d.node_at(ix[0] + s[0], ix[1] + s[1])) == NodeKind::outside)
                    ++outside;
            }
        }
        CHECK(outside == 0);
    }
}

TEST_CASE("ball offsets")
{
    SUBCASE("1D h=0.5")
    {
        const OffsetSet s = OffsetSet::ball(1, 0.5, 1.0);
        std::vector<int> steps;
        for (const auto& st : s.steps())
            steps.push_back(st[0]);
        CHECK(steps == std::vector<int>{-2, -1, 0, 1, 2});
        CHECK(s.weight() == doctest::Approx(0.5));
    }
    SUBCASE("2D h=1 excludes the diagonal")
    {
        const OffsetSet s = OffsetSet::ball(2, 1.0, 1.0);
        CHECK(s.size() == 5);
        const std::set<LatticeStep> got(s.steps().begin(), s.steps().end());
        CHECK(got == std::set<LatticeStep>{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}});
    }
    SUBCASE("2D h=0.5")
    {
        CHECK(OffsetSet::ball(2, 0.5, 1.0).size() == 13);
    }
    SUBCASE("matches brute-force enumeration")
    {
        for (int dim : {1, 2})
            for (double h : {0.25, 0.2, 0.125, 0.1, 1.0 / 16, 1.0 / 32})
                for (double r : {1.0, 0.5, 0.3}) {
                    if (dim == 2 && h < 0.05)
                        continue;
                    const OffsetSet s = OffsetSet::ball(dim, h, r);
                    const auto ref = oracle::brute_ball(dim, h, r);
                    std::set<std::array<int, 2>> a(s.steps().begin(), s.steps().end());
                    std::set<std::array<int, 2>> b(ref.begin(), ref.end());
                    CHECK(a == b);
                }
    }
    SUBCASE("symmetric, contains zero, within radius")
    {
        const OffsetSet s = OffsetSet::ball(2, 0.1, 1.0);
        const std::set<LatticeStep> all(s.steps().begin(), s.steps().end());
        CHECK(all.contains({0, 0}));
        for (const auto& st : s.steps()) {
            CHECK(all.contains({-st[0], -st[1]}));
            CHECK(std::hypot(st[0] * 0.1, st[1] * 0.1) <= 1.0 + 1e-12);
        }
    }
    SUBCASE("cardinality nonincreasing in h")
    {
        std::size_t last = 0;
        for (double h : {0.5, 0.25, 0.2, 0.125, 0.1, 0.0625, 0.05}) {
            const std::size_t n = OffsetSet::ball(2, h, 1.0).size();
            CHECK(n >= last);
            last = n;
        }
    }
}

TEST_CASE("boundary data")
{
    const Domain d = Domain::build(box1(-2, 2), 0.5, coarse());
    const Profile left = [](const Point& p) { return p[0] <= -2 ? 1.0 : 0.0; };
    const Profile right = [](const Point& p) { return p[0] >= 2 ? 1.0 : 0.0; };

    SUBCASE("opposite collars accepted, zero off the collar")
    {
        const std::vector<Profile> prof{left, right};
        const BoundaryData b = make_boundary_data(prof, d);
        CHECK(b.species_count() == 2);
        for (std::size_t n : d.interior_nodes())
            CHECK(b.species(0)[n] == 0.0);
        CHECK(b.max_value() == 1.0);
    }
    SUBCASE("supports closer than one rejected, symmetric in the pair")
    {
        const Profile near = [](const Point& p) {
            return (p[0] >= 2 || (p[0] >= -2.4 && p[0] <= -2.2)) ? 1.0 : 0.0;
        };
        const Domain fine = Domain::build(box1(-2, 2), 0.1);
        const std::vector<Profile> ab{left, near};
        const std::vector<Profile> ba{near, left};
        CHECK_THROWS_WITH_AS(make_boundary_data(ab, fine), doctest::Contains("separation violated"), SeparationError);
        CHECK_THROWS_AS(make_boundary_data(ba, fine), SeparationError);
    }
    SUBCASE("all-zero profiles accepted")
    {
        const Profile zero = [](const Point&) { return 0.0; };
        const std::vector<Profile> prof{zero, zero};
        CHECK_NOTHROW(make_boundary_data(prof, d));
    }
    SUBCASE("negative values rejected")
    {
        const Profile neg = [](const Point& p) { return p[0] <= -2 ? -1.0 : 0.0; };
        const std::vector<Profile> prof{neg};
        CHECK_THROWS_AS(make_boundary_data(prof, d), Error);
    }
    SUBCASE("supports exactly one apart accepted")
    {
        const Domain fine = Domain::build(box2(0, 1), 0.25);
        const Profile a = [](const Point& p) { return p[0] <= 0 ? 1.0 : 0.0; };
        const Profile b = [](const Point& p) { return p[0] >= 1 ? 1.0 : 0.0; };
        const std::vector<Profile> prof{a, b};
        CHECK_NOTHROW(make_boundary_data(prof, fine));
    }
}
