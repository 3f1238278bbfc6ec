// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "segsolve/execute.hpp"
#include "segsolve/parabolic.hpp"
#include "segsolve/segregation.hpp"

using namespace segsolve;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Problem two_sided(Domain d, double left, double right, double eps, KernelKind kind = KernelKind::integral)
{
    const Box box = d.box();
    const std::vector<Profile> prof{[=](const Point& p) { return p[0] <= box.lower[0] ? left : 0.0; },
                                    [=](const Point& p) { return p[0] >= box.upper[0] ? right : 0.0; }};
    BoundaryData b = make_boundary_data(prof, d);
    KernelSpec k(kind, d);
    return Problem{std::move(d), std::move(b), std::move(k), eps};
}

Domain line(double h) { return Domain::build(Box{1, {-2, 0}, {2, 0}}, h); }
Domain square(double h) { return Domain::build(Box{2, {0, 0}, {3, 3}}, h); }

Problem standard_1d(double h, double eps, KernelKind kind = KernelKind::integral)
{
    return two_sided(line(h), 1.0, 1.0, eps, kind);
}

Problem standard_2d(double h, double eps, KernelKind kind = KernelKind::integral)
{
    return two_sided(square(h), 1.0, 1.0, eps, kind);
}

Outcome interleaving()
{
    const Problem p = standard_1d(1.0 / 32, 0.05);
    const MonotoneRun run = run_monotone(p);
    const auto entries = run.state.history.entries();
    const AuditReport a = audit_interleaving(entries, 1e-7);
    double lowest = INFINITY;
    for (const auto& e : entries)
        for (const Field& u : e.fields)
            lowest = std::min(lowest, min_value(u));
    Outcome o;
    o.pass = a.clean() && a.iterates_checked >= 12 && lowest >= 0.0;
    o.detail = std::to_string(a.violations.size()) + " violations over " + std::to_string(a.iterates_checked) +
               " iterates (slack 1e-7), min iterate " + fmt("%.3g", lowest);
    return o;
}

Outcome newton_oracle()
{
    std::vector<Problem> problems;
    problems.push_back(standard_1d(1.0 / 32, 0.05));
    {
        Domain d = line(1.0 / 16);
        const std::vector<Profile> prof{[](const Point& p) { return p[0] <= -2 ? 2.0 : 0.0; },
                                        [](const Point& p) { return p[0] >= 2 ? 0.5 + (p[0] - 2.0) : 0.0; }};
        BoundaryData b = make_boundary_data(prof, d);
        KernelSpec k(KernelKind::integral, d);
        problems.push_back(Problem{std::move(d), std::move(b), std::move(k), 0.01});
    }
    problems.push_back(standard_2d(0.25, 0.1));

    Outcome o{true, ""};
    for (const Problem& p : problems) {
        const MonotoneRun run = run_monotone(p);
        const oracle::NewtonResult ref = oracle::newton_solve(p.domain, p.boundary.all(), p.epsilon, 1.0);
        const double diff = max_abs_difference(run.solution.fields, ref.fields);
        const bool ok = ref.converged && p.domain.interior_nodes().size() <= 500 && diff <= 1e-6;
        o.pass = o.pass && ok;
        o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(p.domain.interior_nodes().size()) +
                    " unknowns, eps " + fmt("%g", p.epsilon) + ": diff " + fmt("%.2e", diff) +
                    (ref.converged ? "" : " (newton did not converge)");
    }
    return o;
}

Outcome sandwich()
{
    Outcome o{true, ""};
    for (const Problem& p : {standard_1d(1.0 / 32, 0.05), standard_2d(0.1, 0.05)}) {
        const MonotoneRun run = run_monotone(p);
        double worst = 0.0;
        bool holds = true;
        for (const Species& init : {scaled_harmonic_start(p, 1.0), scaled_harmonic_start(p, 2.0),
                                    constant_start(p, p.boundary.max_value())}) {
            const Solution w = solve_fixed_point(p, init);
            worst = std::max(worst, max_abs_difference(w.fields, run.solution.fields));
            holds = holds && check_sandwich(run.state, w.fields, 1e-6).holds();
        }
        o.pass = o.pass && worst <= 1e-6 && holds;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + (p.domain.dimension() == 1 ? "1D" : "2D") +
                    " max diff " + fmt("%.2e", worst) + (holds ? ", sandwich holds" : ", sandwich violated");
    }
    return o;
}

SweepReport standard_sweep()
{
    const Problem p = standard_1d(1.0 / 32, 1.0);
    SweepOptions o;
    o.epsilons = {1e-1, 1e-2, 1e-3, 1e-4};
    return epsilon_sweep(p.domain, p.boundary, KernelKind::integral, 1.0, o);
}

Outcome uniform_bounds(const SweepReport& s)
{
    const SweepRow& first = s.rows.front();
    double flux = 0.0, energy = 0.0, inter = 0.0;
    bool ok = true;
    for (const SweepRow& r : s.rows) {
        ok = ok && r.status == "ok";
        if (r.status != "ok")
            continue;
        for (std::size_t i = 0; i < 2; ++i) {
            flux = std::max(flux, r.max_flux[i] / first.max_flux[i]);
            energy = std::max(energy, r.energy[i] / first.energy[i]);
        }
        inter = std::max(inter, (r.interaction[0] / r.epsilon) / (first.interaction[0] / first.epsilon));
    }
    Outcome o;
    o.pass = ok && flux <= 2.0 && energy <= 2.0 && inter <= 2.0;
    o.detail = "max ratio to largest eps: flux " + fmt("%.3f", flux) + ", energy " + fmt("%.3f", energy) +
               ", I12/eps " + fmt("%.3f", inter);
    return o;
}

Outcome distance_one()
{
    Outcome o{true, ""};
    const auto check = [&](const Problem& p, double width, const char* label) {
        const Solution s = run_monotone(p).solution;
        const double h = p.domain.spacing();
        const double d = support_distance(s.fields[0], s.fields[1], 1e-3, p.domain);
        const bool ok = d >= 1.0 - width * h - 1e-12 && d <= 1.0 + width * h + 1e-12;
        o.pass = o.pass && ok;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + label + " " + fmt("%.4f", d) + " in [" +
                    fmt("%.4f", 1.0 - width * h) + ", " + fmt("%.4f", 1.0 + width * h) + "]" + (ok ? "" : " no");
    };
    check(standard_1d(1.0 / 32, 1e-4, KernelKind::integral), 4, "1D integral");
    check(standard_1d(1.0 / 32, 1e-4, KernelKind::sup), 4, "1D sup");
    check(standard_2d(0.1, 1e-4, KernelKind::integral), 6, "2D integral");
    check(standard_2d(0.1, 1e-4, KernelKind::sup), 6, "2D sup");

    // Reference only, not part of the verdict: the 1D distances one decade
    // further along in eps.
    std::string later;
    for (KernelKind k : {KernelKind::integral, KernelKind::sup}) {
        const Problem p = standard_1d(1.0 / 32, 1e-6, k);
        const Solution s = run_monotone(p).solution;
        later += std::string(later.empty() ? "" : ", ") + to_string(k) + " " +
                 fmt("%.4f", support_distance(s.fields[0], s.fields[1], 1e-3, p.domain));
    }
    o.detail += "; for reference at eps 1e-6 in 1D: " + later;
    return o;
}

Outcome decay(const SweepReport& s)
{
    std::vector<double> logs;
    for (const SweepRow& r : s.rows)
        logs.push_back(std::log(r.decay_sup));
    bool ok = logs.size() >= 3;
    std::string detail = "log sup at r=1/2:";
    for (double l : logs) {
        ok = ok && std::isfinite(l);
        detail += " " + fmt("%.2f", l);
    }
    for (std::size_t q = 1; q < logs.size(); ++q)
        ok = ok && logs[q] < logs[q - 1];
    for (std::size_t q = 2; q < logs.size(); ++q)
        ok = ok && (logs[q] - logs[q - 1]) < (logs[q - 1] - logs[q - 2]);
    return {ok, detail};
}

Outcome free_boundary()
{
    const auto report = [](double eps, double h) {
        const Problem p = standard_1d(h, eps, KernelKind::sup);
        return free_boundary_1d(run_monotone(p).solution.fields, p.domain, p.kernel, 1e-3);
    };
    const FreeBoundaryReport coarse = report(1e-4, 1.0 / 64);
    const FreeBoundaryReport fine = report(1e-4, 1.0 / 128);
    const double ratio = coarse.affinity_defect / fine.affinity_defect;

    std::vector<double> residuals;
    for (const auto& [eps, h] : std::vector<std::pair<double, double>>{{1e-3, 1.0 / 32}, {1e-4, 1.0 / 64}, {1e-5, 1.0 / 128}})
        residuals.push_back(report(eps, h).slope_residual);
    bool decreasing = true;
    for (std::size_t q = 1; q < residuals.size(); ++q)
        decreasing = decreasing && residuals[q] < residuals[q - 1];

    Outcome o;
    o.pass = ratio >= 3.0 && ratio <= 5.0 && decreasing;
    o.detail = "affinity defect " + fmt("%.3e", coarse.affinity_defect) + " -> " + fmt("%.3e", fine.affinity_defect) +
               " (ratio " + fmt("%.3f", ratio) + ", need [3,5]); slope residuals " + fmt("%.4f", residuals[0]) +
               " " + fmt("%.4f", residuals[1]) + " " + fmt("%.4f", residuals[2]) +
               (decreasing ? " decreasing" : " not decreasing");
    return o;
}

Outcome parabolic()
{
    const Problem p = standard_1d(1.0 / 32, 0.1);
    const double h = p.domain.spacing();
    const ParabolicState start = make_initial_state(p, scaled_harmonic_start(p, 1.0), h * h, nullptr);
    EvolveOptions o;
    o.steady_tolerance = 1e-7;
    o.trace_stride = 1000;
    const EvolveResult r = evolve(start, p, o);
    const double diff = max_abs_difference(r.state.fields, run_monotone(p).solution.fields);
    Outcome out;
    out.pass = r.reached_steady && diff < 1e-5 && r.max_mass_defect <= 1e-9;
    out.detail = "t=" + fmt("%.3f", r.state.time) + " after " + std::to_string(r.steps) + " steps, diff " +
                 fmt("%.2e", diff) + ", max mass defect " + fmt("%.2e", r.max_mass_defect);
    return out;
}

double cosh_error(int dim, double h)
{
    const double a = dim == 1 ? 2.0 : 1.0;
    const double b = dim == 1 ? 0.0 : 1.5;
    const Domain d = dim == 1 ? Domain::build(Box{1, {-1, 0}, {1, 0}}, h) : Domain::build(Box{2, {-1, -1}, {1, 1}}, h);
    Field data = d.make_field();
    for (std::size_t n : d.collar_nodes())
        data[n] = oracle::cosh_exact(d.position(n), dim, a, b);
    const Field u = screened_solve(d.make_field(a * a + b * b), data, d).field;
    double err = 0.0;
    for (std::size_t n : d.interior_nodes())
        err = std::max(err, std::abs(u[n] - oracle::cosh_exact(d.position(n), dim, a, b)));
    return err;
}

Outcome cosh_convergence()
{
    const double r1 = cosh_error(1, 1.0 / 16) / cosh_error(1, 1.0 / 32);
    const double r2 = cosh_error(1, 1.0 / 32) / cosh_error(1, 1.0 / 64);
    const double r3 = cosh_error(2, 1.0 / 8) / cosh_error(2, 1.0 / 16);
    const auto in = [](double r) { return r >= 3.5 && r <= 4.5; };
    return {in(r1) && in(r2) && in(r3), "error ratios 1D " + fmt("%.4f", r1) + ", " + fmt("%.4f", r2) + "; 2D " +
                                            fmt("%.4f", r3)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism()
{
    const std::string base = R"(
[domain]
dimension = 1
lower = -2
upper = 2
spacing = 0.03125
[species]
constant = -3 -2 1
[species]
constant = 2 3 1
)";
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"solve", base + "[run]\nepsilon = 0.05\n[diagnostics]\nuniqueness_check = true\n"},
        {"sweep", base + "[run]\nepsilon = 1e-1, 1e-2, 1e-3\n"},
        {"parabolic", base + "[run]\nepsilon = 0.1\n[parabolic]\nfinal_time = 0.5\n"},
        {"fb1d", base + "[run]\nepsilon = 1e-3\n[kernel]\nvariant = sup\n"},
    };
    const fs::path root = fs::temp_directory_path() / "segsolve_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    std::size_t compared = 0;
    bool same = true;
    for (const auto& [command, text] : runs) {
        const fs::path cfg = root / (command + ".cfg");
        std::ofstream(cfg) << text;
        for (int rep : {1, 2}) {
            const std::string cmd = "SEGSOLVE_THREADS=" + std::to_string(rep) + " '" + SEGSOLVE_CLI_PATH + "' " +
                                    command + " --config '" + cfg.string() + "' --out '" +
                                    (root / (command + std::to_string(rep))).string() + "' 2>/dev/null";
            if (std::system(cmd.c_str()) != 0)
                return {false, command + " run failed"};
        }
        for (const auto& entry : fs::directory_iterator(root / (command + "1"))) {
            const fs::path other = root / (command + "2") / entry.path().filename();
            same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
            ++compared;
        }
    }
    return {same && compared > 0, std::to_string(compared) + " artifacts compared across 4 commands" +
                                      (same ? ", all byte-identical" : ", differences found")};
}

} // namespace

int main()
{
    int failures = 0;
    const auto run = [&](int id, const char* name, double budget, const std::function<Outcome()>& f) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (budget > 0.0 && secs > budget) {
            o.pass = false;
            o.detail += "; over time budget";
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %2d %s: %s - %s (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
    };

    run(1, "monotone interleaving", 10, interleaving);
    run(2, "Newton oracle equivalence", 60, newton_oracle);
    run(3, "uniqueness sandwich", 300, sandwich);
    SweepReport sweep;
    run(4, "uniform bounds over the sweep", 120, [&] {
        sweep = standard_sweep();
        return uniform_bounds(sweep);
    });
    run(5, "support distance one", 0, distance_one);
    run(6, "exponential decay", 0, [&] { return decay(sweep); });
    run(7, "1D free boundary", 300, free_boundary);
    run(8, "parabolic consistency", 120, parabolic);
    run(9, "cosh mesh convergence", 0, cosh_convergence);
    run(10, "determinism", 0, determinism);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
