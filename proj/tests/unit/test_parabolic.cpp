#include <cmath>

#include "doctest.h"
#include "segsolve/parabolic.hpp"

using namespace segsolve;

namespace {

Problem make(int species, double h, double eps, double data = 1.0)
{
    Domain d = Domain::build(Box{1, {-2, 0}, {2, 0}}, h);
    std::vector<Profile> prof{[=](const Point& p) { return p[0] <= -2 ? data : 0.0; }};
    if (species == 2)
        prof.push_back([=](const Point& p) { return p[0] >= 2 ? data : 0.0; });
    BoundaryData b = make_boundary_data(prof, d);
    KernelSpec k(KernelKind::integral, d);
    return Problem{std::move(d), std::move(b), std::move(k), eps};
}

Species bump(const Problem& p, double height)
{
    Species s = scaled_harmonic_start(p, 0.0);
    for (Field& u : s)
        for (std::size_t n : p.domain.interior_nodes()) {
            const double x = p.domain.position(n)[0];
            u[n] = height * std::exp(-4.0 * x * x);
        }
    return s;
}

} // namespace

TEST_CASE("harmonic data is stationary for one species")
{
    const Problem p = make(1, 1.0 / 32, 0.1);
    const ParabolicState s0 = make_initial_state(p, scaled_harmonic_start(p, 1.0), 1e-3, nullptr);
    const ParabolicState s1 = imex_step(s0, p);
    CHECK(max_abs_difference(s1.fields, s0.fields) < 1e-12);
    CHECK(s1.time == doctest::Approx(1e-3));
}

TEST_CASE("heat decay with zero data")
{
    const Problem p = make(1, 1.0 / 32, 0.1, 0.0);
    ImexStepper stepper(p, {});
    ParabolicState s = make_initial_state(p, bump(p, 1.0), 1e-3, nullptr);
    double last = max_value(s.fields[0]);
    for (int n = 0; n < 50; ++n) {
        s = stepper.step(s);
        const double now = max_value(s.fields[0]);
        CHECK(now < last);
        last = now;
    }
}

TEST_CASE("zero final time returns the initial state")
{
    const Problem p = make(2, 1.0 / 32, 0.1);
    const ParabolicState s0 = make_initial_state(p, scaled_harmonic_start(p, 1.0), 1e-3, nullptr);
    EvolveOptions o;
    o.final_time = 0.0;
    const EvolveResult r = evolve(s0, p, o);
    CHECK(r.steps == 0);
    CHECK(r.state.fields == s0.fields);
    CHECK(r.state.time == 0.0);
}

TEST_CASE("final time is hit exactly")
{
    const Problem p = make(2, 1.0 / 16, 0.1);
    const ParabolicState s0 = make_initial_state(p, scaled_harmonic_start(p, 1.0), 0.03, nullptr);
    EvolveOptions o;
    o.final_time = 0.1;
    const EvolveResult r = evolve(s0, p, o);
    CHECK(r.steps == 4);
    CHECK(r.state.time == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(r.trace.size() == 5);
}

TEST_CASE("steady state reproduces the elliptic solution")
{
    const Problem p = make(2, 1.0 / 32, 0.1);
    const double h = p.domain.spacing();
    const ParabolicState s0 = make_initial_state(p, scaled_harmonic_start(p, 1.0), h * h, nullptr);
    EvolveOptions o;
    o.steady_tolerance = 1e-7;
    o.trace_stride = 100;
    const EvolveResult r = evolve(s0, p, o);
    const MonotoneRun elliptic = run_monotone(p);
    CHECK(r.reached_steady);
    CHECK(max_abs_difference(r.state.fields, elliptic.solution.fields) < 1e-5);
    CHECK(r.max_mass_defect <= 1e-9);
}

TEST_CASE("growth from zero stays below the harmonic extensions")
{
    const Problem p = make(2, 1.0 / 32, 0.05);
    const Species harmonic = scaled_harmonic_start(p, 1.0);
    ImexStepper stepper(p, {});
    ParabolicState s = make_initial_state(p, scaled_harmonic_start(p, 0.0), 1e-3, nullptr);
    std::vector<MassBalance> balance;
    double mass = 0.0;
    for (int n = 0; n < 300; ++n) {
        s = stepper.step(s, &balance);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(min_value(s.fields[i]) >= 0.0);
            for (std::size_t q : p.domain.interior_nodes())
                CHECK(s.fields[i][q] <= harmonic[i][q] + 1e-12);
            CHECK(balance[i].relative_defect <= 1e-9);
        }
        double now = 0.0;
        for (std::size_t q : p.domain.interior_nodes())
            now += s.fields[0][q];
        CHECK(now > mass);
        mass = now;
    }
}

TEST_CASE("ordered initial data stay ordered for one species")
{
    const Problem p = make(1, 1.0 / 32, 0.1);
    ImexStepper stepper(p, {});
    ParabolicState lo = make_initial_state(p, bump(p, 0.5), 1e-3, nullptr);
    ParabolicState hi = make_initial_state(p, bump(p, 2.0), 1e-3, nullptr);
    for (int n = 0; n < 100; ++n) {
        lo = stepper.step(lo);
        hi = stepper.step(hi);
        for (std::size_t q = 0; q < p.domain.node_count(); ++q)
            CHECK(lo.fields[0][q] <= hi.fields[0][q] + 1e-12);
    }
}

TEST_CASE("threaded stepping matches serial stepping")
{
    const Problem p = make(2, 1.0 / 32, 0.05);
    const ParabolicState s0 = make_initial_state(p, scaled_harmonic_start(p, 1.0), 1e-3, nullptr);
    ImexStepper a(p, {}, 1);
    ImexStepper b(p, {}, 2);
    CHECK(a.step(s0).fields == b.step(s0).fields);
}

TEST_CASE("input validation")
{
    const Problem p = make(2, 1.0 / 16, 0.1);
    CHECK_THROWS_AS(make_initial_state(p, scaled_harmonic_start(p, 1.0), 0.0, nullptr), Error);
    Species neg = scaled_harmonic_start(p, 1.0);
    neg[1][p.domain.interior_nodes()[2]] = -0.1;
    CHECK_THROWS_AS(make_initial_state(p, neg, 0.01, nullptr), Error);

    Species off = scaled_harmonic_start(p, 1.0);
    off[0][p.domain.collar_nodes()[0]] = 0.25;
    double mismatch = 0.0;
    const ParabolicState s = make_initial_state(p, off, 0.01, &mismatch);
    CHECK(mismatch == doctest::Approx(0.75));
    CHECK(s.fields[0][p.domain.collar_nodes()[0]] == 1.0);

    EvolveOptions o;
    CHECK_THROWS_AS(evolve(s, p, o), Error);
}
