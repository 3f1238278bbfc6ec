#include "segsolve/execute.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "segsolve/grid_io.hpp"
#include "segsolve/parabolic.hpp"
#include "segsolve/segregation.hpp"

namespace segsolve {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string config_hash(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Problem build_problem(const RunConfig& config)
{
    Domain domain = Domain::build(config.box, config.spacing);
    std::vector<Profile> profiles;
    for (const SpeciesSpec& s : config.species)
        profiles.push_back(make_profile(s, config.box.dimension));
    BoundaryData boundary = make_boundary_data(profiles, domain);
    KernelSpec kernel(config.kernel, domain, config.radius);
    return Problem{std::move(domain), std::move(boundary), std::move(kernel), config.epsilon()};
}

namespace {

class IoError : public Error {
public:
    using Error::Error;
};

constexpr double sandwich_slack = 1e-6;
constexpr std::size_t violations_listed = 20;

double audit_slack(const RunConfig& c) { return 10.0 * c.linear_tolerance; }

double resolved_theta(const RunConfig& c, const BoundaryData& b)
{
    const double scale = b.max_value() > 0.0 ? b.max_value() : 1.0;
    return c.theta > 0.0 ? c.theta : 1e-3 * scale;
}

double resolved_dt(const RunConfig& c) { return c.dt > 0.0 ? c.dt : c.spacing * c.spacing; }

Json tolerances(const RunConfig& c, const BoundaryData* b)
{
    Json t;
    t["outer_tolerance"] = c.outer_tolerance;
    t["linear_tolerance"] = c.linear_tolerance;
    t["audit_slack"] = audit_slack(c);
    t["fixed_point_tolerance"] = c.fixed_point_tolerance;
    t["sandwich_slack"] = sandwich_slack;
    t["max_outer_iterations"] = c.max_outer_iterations;
    if (c.command == Command::parabolic) {
        t["dt"] = resolved_dt(c);
        t["final_time"] = c.final_time;
        t["steady_tolerance"] = c.steady_tolerance;
    }
    if (b) {
        t["theta"] = resolved_theta(c, *b);
        if (c.command == Command::sweep) {
            t["sigma"] = c.sigma > 0.0 ? c.sigma : 0.5 * b->max_value();
            t["decay_r"] = c.decay_r;
        }
    }
    return t;
}

Json problem_json(const RunConfig& c)
{
    Json p;
    p["dimension"] = c.box.dimension;
    p["lower"] = std::vector<double>(c.box.lower.begin(), c.box.lower.begin() + c.box.dimension);
    p["upper"] = std::vector<double>(c.box.upper.begin(), c.box.upper.begin() + c.box.dimension);
    p["spacing"] = c.spacing;
    p["species"] = c.species_count();
    p["kernel"] = to_string(c.kernel);
    p["radius"] = c.radius;
    if (c.command == Command::sweep)
        p["epsilon"] = c.epsilons;
    else
        p["epsilon"] = c.epsilon();
    p["linear_method"] = to_string(c.linear_method);
    return p;
}

MonotoneOptions monotone_options(const RunConfig& c, unsigned threads)
{
    MonotoneOptions o;
    o.outer_tolerance = c.outer_tolerance;
    o.max_iterations = c.max_outer_iterations;
    o.history_cap = c.history_cap;
    o.linear.method = c.linear_method;
    o.linear.tolerance = c.linear_tolerance;
    o.threads = threads;
    return o;
}

FixedPointOptions fixed_point_options(const RunConfig& c, unsigned threads)
{
    FixedPointOptions o;
    o.damping = c.damping;
    o.tolerance = c.fixed_point_tolerance;
    o.linear.method = c.linear_method;
    o.linear.tolerance = c.linear_tolerance;
    o.threads = threads;
    return o;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void write_solution_grids(const fs::path& dir, const Species& fields, const Domain& domain)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        auto out = open_output(dir / ("solution_" + std::to_string(i) + ".grid"));
        write_grid(out, fields[i], domain);
    }
}

void write_history(const fs::path& dir, const IterationState& state)
{
    auto out = open_output(dir / "history.csv");
    out << "k,species,gap,min,max,flux\n";
    for (const IterationRecord& r : state.records)
        for (std::size_t i = 0; i < r.min_value.size(); ++i)
            out << r.k << ',' << i << ',' << format_double(r.gap) << ',' << format_double(r.min_value[i]) << ','
                << format_double(r.max_value[i]) << ',' << format_double(r.flux[i]) << '\n';
}

Json audit_json(const AuditReport& a, bool enabled)
{
    Json j;
    j["enabled"] = enabled;
    j["iterates_checked"] = a.iterates_checked;
    j["slack"] = a.slack;
    j["violation_count"] = a.violations.size();
    j["max_violation"] = a.max_violation;
    Json list = Json::array();
    for (std::size_t q = 0; q < a.violations.size() && q < violations_listed; ++q) {
        const AuditViolation& v = a.violations[q];
        list.push_back({{"kind", to_string(v.kind)},
                        {"species", v.species},
                        {"node", v.node},
                        {"k_first", v.k_first},
                        {"k_second", v.k_second},
                        {"magnitude", v.magnitude}});
    }
    j["violations"] = list;
    return j;
}

Json solution_json(const Solution& s)
{
    return {{"method", s.method},
            {"iterations", s.iterations},
            {"final_gap", s.final_gap},
            {"residual_raw", s.residual.raw},
            {"residual_scaled", s.residual.scaled}};
}

Json field_diagnostics(const Species& fields, const Problem& p, double theta)
{
    const std::size_t m = fields.size();
    Json d;
    Json energy = Json::array(), flux = Json::array(), minimum = Json::array();
    for (const Field& u : fields) {
        energy.push_back(dirichlet_energy(u, p.domain));
        flux.push_back(boundary_flux(u, p.domain).max_abs);
        minimum.push_back(min_value(u));
    }
    d["dirichlet_energy"] = energy;
    d["max_boundary_flux"] = flux;
    d["min_value"] = minimum;
    Json inter = Json::array(), dist = Json::array();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j)
                continue;
            inter.push_back({{"i", i}, {"j", j}, {"value", interaction_integral(fields[i], fields[j], p.domain, p.kernel)}});
            if (i < j)
                dist.push_back({{"i", i}, {"j", j}, {"value", support_distance(fields[i], fields[j], theta, p.domain)}});
        }
    d["interaction"] = inter;
    d["support_distance"] = dist;
    d["theta"] = theta;
    return d;
}

int run_solve(const RunConfig& c, const fs::path& dir, unsigned threads, Json& report)
{
    const Problem p = build_problem(c);
    report["tolerances"] = tolerances(c, &p.boundary);
    const MonotoneRun run = run_monotone(p, monotone_options(c, threads));
    write_solution_grids(dir, run.solution.fields, p.domain);
    if (c.write_history)
        write_history(dir, run.state);

    report["solution"] = solution_json(run.solution);
    report["audit"] = audit_json(run.audit, c.audit);
    report["limit_checks"] = {{"even_flux", run.checks.even_flux},
                              {"odd_flux", run.checks.odd_flux},
                              {"even_strip", run.checks.even_strip},
                              {"odd_strip", run.checks.odd_strip},
                              {"candidate_gap", run.checks.candidate_gap}};
    report["diagnostics"] = field_diagnostics(run.solution.fields, p, resolved_theta(c, p.boundary));

    if (c.uniqueness_check) {
        Json u;
        u["exploratory"] = c.kernel == KernelKind::sup;
        Json starts = Json::array();
        const std::vector<std::pair<std::string, Species>> inits = {
            {"harmonic", scaled_harmonic_start(p, 1.0, monotone_options(c, 1).linear)},
            {"twice_harmonic", scaled_harmonic_start(p, 2.0, monotone_options(c, 1).linear)},
            {"constant", constant_start(p, p.boundary.max_value())},
        };
        for (const auto& [name, init] : inits) {
            Json s{{"start", name}};
            try {
                const Solution w = solve_fixed_point(p, init, fixed_point_options(c, threads));
                const SandwichReport sw = check_sandwich(run.state, w.fields, sandwich_slack);
                s["status"] = "ok";
                s["iterations"] = w.iterations;
                s["difference"] = max_abs_difference(w.fields, run.solution.fields);
                s["below_violation"] = sw.below_violation;
                s["above_violation"] = sw.above_violation;
                s["sandwich_holds"] = sw.holds();
            } catch (const Error& e) {
                s["status"] = "failed";
                s["message"] = e.what();
            }
            starts.push_back(s);
        }
        u["starts"] = starts;
        report["uniqueness"] = u;
    }
    return c.audit && !run.audit.clean() ? exit_status::audit_failed : exit_status::ok;
}

int run_sweep(const RunConfig& c, const fs::path& dir, unsigned threads, Json& report, std::ostream& log)
{
    const Problem p = build_problem(c);
    report["tolerances"] = tolerances(c, &p.boundary);
    SweepOptions o;
    o.epsilons = c.epsilons;
    o.theta = c.theta;
    o.sigma = c.sigma;
    o.decay_r = c.decay_r;
    o.warm_start = c.warm_start;
    o.monotone = monotone_options(c, threads);
    o.fixed_point = fixed_point_options(c, threads);
    const SweepReport s = epsilon_sweep(p.domain, p.boundary, c.kernel, c.radius, o);
    const std::size_t m = s.species;

    auto out = open_output(dir / "sweep.csv");
    out << "epsilon,status,method,iterations,residual";
    for (std::size_t i = 0; i < m; ++i)
        out << ",energy_" << i;
    for (std::size_t i = 0; i < m; ++i)
        out << ",max_flux_" << i;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j)
                out << ",interaction_" << i << '_' << j;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            out << ",distance_" << i << '_' << j;
    out << ",decay_sup\n";

    Json rows = Json::array();
    std::vector<std::pair<double, double>> decay;
    bool failed = false;
    for (const SweepRow& r : s.rows) {
        log << "epsilon " << r.epsilon << ": " << r.status << " in " << r.runtime_seconds << " s\n";
        failed = failed || r.status != "ok";
        out << format_double(r.epsilon) << ',' << r.status << ',' << r.method << ',' << r.iterations << ','
            << format_double(r.residual);
        const auto emit = [&](const std::vector<double>& v, std::size_t n) {
            for (std::size_t q = 0; q < n; ++q)
                out << ',' << (q < v.size() ? format_double(v[q]) : "nan");
        };
        emit(r.energy, m);
        emit(r.max_flux, m);
        emit(r.interaction, m * (m - 1));
        emit(r.distance, m * (m - 1) / 2);
        out << ',' << format_double(r.decay_sup) << '\n';
        if (std::isfinite(r.decay_sup) && r.decay_sup > 0.0)
            decay.emplace_back(r.epsilon, r.decay_sup);
        rows.push_back({{"epsilon", r.epsilon},
                        {"status", r.status},
                        {"method", r.method},
                        {"message", r.message},
                        {"iterations", r.iterations},
                        {"residual_scaled", r.residual},
                        {"dirichlet_energy", r.energy},
                        {"max_boundary_flux", r.max_flux},
                        {"interaction", r.interaction},
                        {"support_distance", r.distance},
                        {"decay_sup", r.decay_sup}});
    }
    if (!out)
        throw IoError("failed writing sweep.csv");
    if (s.last_solution)
        write_solution_grids(dir, s.last_solution->fields, p.domain);

    Json sweep;
    sweep["theta"] = s.theta;
    sweep["sigma"] = s.sigma;
    sweep["decay_r"] = s.decay_r;
    sweep["rows"] = rows;
    sweep["decay_slope"] = decay.size() >= 2 ? Json(decay_slope(decay)) : Json(nullptr);
    report["sweep"] = sweep;
    return failed ? exit_status::failure : exit_status::ok;
}

int run_parabolic(const RunConfig& c, const fs::path& dir, unsigned threads, Json& report)
{
    const Problem p = build_problem(c);
    report["tolerances"] = tolerances(c, &p.boundary);
    const LinearSolverOptions linear = monotone_options(c, threads).linear;
    Species init = c.initial == "harmonic" ? scaled_harmonic_start(p, 1.0, linear) : scaled_harmonic_start(p, 0.0, linear);
    double mismatch = 0.0;
    const ParabolicState start = make_initial_state(p, std::move(init), resolved_dt(c), &mismatch);

    EvolveOptions o;
    o.final_time = c.final_time;
    o.steady_tolerance = std::isfinite(c.final_time) ? 0.0 : c.steady_tolerance;
    o.linear = linear;
    o.threads = threads;
    const EvolveResult r = evolve(start, p, o);

    write_solution_grids(dir, r.state.fields, p.domain);
    auto out = open_output(dir / "trace.csv");
    out << "t";
    for (std::size_t i = 0; i < p.species_count(); ++i)
        out << ",mass_" << i;
    out << ",interaction,delta\n";
    for (const TraceRow& row : r.trace) {
        out << format_double(row.time);
        for (double mass : row.mass)
            out << ',' << format_double(mass);
        out << ',' << format_double(row.interaction) << ',' << format_double(row.delta) << '\n';
    }
    if (!out)
        throw IoError("failed writing trace.csv");

    double lowest = INFINITY;
    for (const Field& u : r.state.fields)
        lowest = std::min(lowest, min_value(u));
    Json e;
    e["initial"] = c.initial;
    e["time"] = r.state.time;
    e["steps"] = r.steps;
    e["reached_steady"] = r.reached_steady;
    e["max_mass_defect"] = r.max_mass_defect;
    e["collar_mismatch"] = mismatch;
    e["min_value"] = lowest;
    const MonotoneRun elliptic = run_monotone(p, monotone_options(c, threads));
    e["elliptic_difference"] = max_abs_difference(r.state.fields, elliptic.solution.fields);
    report["parabolic"] = e;
    return exit_status::ok;
}

int run_fb1d(const RunConfig& c, const fs::path& dir, unsigned threads, Json& report)
{
    const Problem p = build_problem(c);
    report["tolerances"] = tolerances(c, &p.boundary);
    const MonotoneRun run = run_monotone(p, monotone_options(c, threads));
    write_solution_grids(dir, run.solution.fields, p.domain);
    if (c.write_history)
        write_history(dir, run.state);
    report["solution"] = solution_json(run.solution);
    report["audit"] = audit_json(run.audit, c.audit);

    const FreeBoundaryReport fb = free_boundary_1d(run.solution.fields, p.domain, p.kernel, resolved_theta(c, p.boundary));
    report["free_boundary"] = {{"theta", fb.theta},
                               {"x_f", fb.x_f},
                               {"v_crossing", fb.v_crossing},
                               {"u_slope", fb.u_slope},
                               {"v_slope", fb.v_slope},
                               {"slope_residual", fb.slope_residual},
                               {"affinity_defect", fb.affinity_defect},
                               {"sup_identity_fraction_u", fb.sup_identity_fraction_u},
                               {"sup_identity_fraction_v", fb.sup_identity_fraction_v}};
    return c.audit && !run.audit.clean() ? exit_status::audit_failed : exit_status::ok;
}

void write_report(const fs::path& dir, const Json& report)
{
    auto out = open_output(dir / "report.json");
    out << report.dump(2) << '\n';
    if (!out)
        throw IoError("failed writing report.json");
}

Json error_json(const std::string& type, const std::string& message)
{
    return {{"type", type}, {"message", message}};
}

} // namespace

ExecuteOutcome execute(const RunConfig& config, const std::string& out_dir, unsigned threads)
{
    ExecuteOutcome outcome;
    outcome.out_dir = out_dir;
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        outcome.status = exit_status::io_error;
        outcome.message = "cannot create output directory " + out_dir + ": " + ec.message();
        return outcome;
    }

    Json report;
    report["tool"] = "segsolve";
    report["command"] = to_string(config.command);
    report["status"] = "ok";
    report["provenance"] = {{"config_hash", "fnv1a64:" + config_hash(config.source_text)}};
    report["tolerances"] = tolerances(config, nullptr);
    report["problem"] = problem_json(config);

    try {
        switch (config.command) {
        case Command::solve:
            outcome.status = run_solve(config, dir, threads, report);
            break;
        case Command::sweep:
            outcome.status = run_sweep(config, dir, threads, report, std::cerr);
            break;
        case Command::parabolic:
            outcome.status = run_parabolic(config, dir, threads, report);
            break;
        case Command::fb1d:
            outcome.status = run_fb1d(config, dir, threads, report);
            break;
        }
        if (outcome.status == exit_status::audit_failed) {
            report["status"] = "error";
            report["error"] = error_json("audit", "interleaving audit reported violations");
        } else if (outcome.status != exit_status::ok) {
            report["status"] = "error";
            report["error"] = error_json("partial_failure", "at least one sweep row failed");
        }
    } catch (const IoError& e) {
        outcome.status = exit_status::io_error;
        report["status"] = "error";
        report["error"] = error_json("io", e.what());
    } catch (const IterationError& e) {
        outcome.status = exit_status::failure;
        report["status"] = "error";
        report["error"] = error_json("no_convergence", e.what());
        report["error"]["last_gaps"] = e.gaps;
    } catch (const LinearSolveError& e) {
        outcome.status = exit_status::failure;
        report["status"] = "error";
        report["error"] = error_json("linear_solve", e.what());
    } catch (const SeparationError& e) {
        outcome.status = exit_status::invalid_config;
        report["status"] = "error";
        report["error"] = error_json("separation", e.what());
        report["error"]["species"] = {e.species_i, e.species_j};
    } catch (const std::exception& e) {
        outcome.status = exit_status::failure;
        report["status"] = "error";
        report["error"] = error_json("runtime", e.what());
    }
    if (report.contains("error"))
        outcome.message = report["error"]["message"].get<std::string>();

    try {
        write_report(dir, report);
    } catch (const IoError& e) {
        outcome.status = exit_status::io_error;
        outcome.message = e.what();
    }
    return outcome;
}

ExecuteOutcome execute_text(const std::string& text, std::optional<Command> command,
                            std::optional<std::string> out_dir, unsigned threads)
{
    RunConfig config;
    try {
        config = parse_config(text, command);
    } catch (const ConfigError& e) {
        ExecuteOutcome outcome{exit_status::invalid_config, e.what(), out_dir.value_or("")};
        if (out_dir) {
            std::error_code ec;
            fs::create_directories(*out_dir, ec);
            Json report;
            report["tool"] = "segsolve";
            report["command"] = command ? to_string(*command) : "";
            report["status"] = "error";
            report["provenance"] = {{"config_hash", "fnv1a64:" + config_hash(text)}};
            report["error"] = {{"type", "invalid_config"}, {"message", e.what()}, {"errors", e.errors}};
            try {
                write_report(*out_dir, report);
            } catch (const IoError&) {
                outcome.status = exit_status::io_error;
            }
        }
        return outcome;
    }
    return execute(config, out_dir.value_or(config.output_dir), threads);
}

} // namespace segsolve
