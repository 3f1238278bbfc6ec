#include "segsolve/parabolic.hpp"

#include <algorithm>
#include <cmath>

#include "segsolve/parallel.hpp"

namespace segsolve {

ImexStepper::ImexStepper(const Problem& problem, const LinearSolverOptions& linear, unsigned threads)
    : problem_(&problem), threads_(std::max(1u, threads))
{
    operators_.reserve(problem.species_count());
    for (std::size_t i = 0; i < problem.species_count(); ++i)
        operators_.emplace_back(problem.domain, linear);
}

ParabolicState ImexStepper::step(const ParabolicState& state, std::vector<MassBalance>* balance)
{
    const Problem& p = *problem_;
    const Domain& domain = p.domain;
    if (!(state.dt > 0.0))
        throw Error("time step must be positive");
    const std::size_t m = p.species_count();

    std::vector<Field> h(m);
    parallel_for(m, threads_, [&](std::size_t j) { h[j] = apply_kernel(state.fields[j], domain, p.kernel); });

    ParabolicState next;
    next.time = state.time + state.dt;
    next.dt = state.dt;
    next.fields.resize(m);
    std::vector<Field> coefficients(m);
    const double inv_dt = 1.0 / state.dt;
    parallel_for(m, threads_, [&](std::size_t i) {
        coefficients[i] = interaction_coefficient_from(h, i, p.epsilon, domain);
        Field shift = coefficients[i];
        Field source = domain.make_field();
        for (std::size_t n : domain.interior_nodes()) {
            shift[n] += inv_dt;
            source[n] = state.fields[i][n] * inv_dt;
        }
        next.fields[i] = operators_[i].solve(shift, p.boundary.species(i), &source);
    });

    if (balance) {
        balance->assign(m, {});
        const double vol = domain.cell_volume();
        for (std::size_t i = 0; i < m; ++i) {
            double change = 0.0;
            double reaction = 0.0;
            for (std::size_t n : domain.interior_nodes()) {
                change += (next.fields[i][n] - state.fields[i][n]) * vol;
                reaction += coefficients[i][n] * next.fields[i][n] * vol;
            }
            const double flux = boundary_flux_total(next.fields[i], domain);
            MassBalance& b = (*balance)[i];
            b.lhs = change * inv_dt;
            b.rhs = flux - reaction;
            const double scale = std::max({std::abs(b.lhs), std::abs(flux), std::abs(reaction), 1e-300});
            b.relative_defect = std::abs(b.lhs - b.rhs) / scale;
        }
    }
    return next;
}

ParabolicState imex_step(const ParabolicState& state, const Problem& problem, const LinearSolverOptions& linear)
{
    ImexStepper stepper(problem, linear);
    return stepper.step(state);
}

ParabolicState make_initial_state(const Problem& problem, Species initial, double dt, double* collar_mismatch)
{
    const Domain& domain = problem.domain;
    if (initial.size() != problem.species_count())
        throw Error("initial data has the wrong species count");
    if (!(dt > 0.0))
        throw Error("time step must be positive");
    double mismatch = 0.0;
    for (std::size_t i = 0; i < initial.size(); ++i) {
        Field& u = initial[i];
        if (u.size() != domain.node_count())
            throw Error("initial field size does not match the domain");
        for (std::size_t n : domain.interior_nodes())
            if (!(u[n] >= 0.0))
                throw Error("initial data must be nonnegative");
        for (std::size_t n : domain.collar_nodes()) {
            mismatch = std::max(mismatch, std::abs(u[n] - problem.boundary.species(i)[n]));
            u[n] = problem.boundary.species(i)[n];
        }
    }
    if (collar_mismatch)
        *collar_mismatch = mismatch;
    return ParabolicState{0.0, std::move(initial), dt};
}

namespace {

TraceRow make_row(const Problem& problem, const ParabolicState& state, double delta, double defect)
{
    const Domain& domain = problem.domain;
    TraceRow row{state.time, {}, 0.0, delta, defect};
    const double vol = domain.cell_volume();
    std::vector<Field> h;
    for (const Field& u : state.fields) {
        double mass = 0.0;
        for (std::size_t n : domain.interior_nodes())
            mass += u[n] * vol;
        row.mass.push_back(mass);
        h.push_back(apply_kernel(u, domain, problem.kernel));
    }
    for (std::size_t i = 0; i < state.fields.size(); ++i)
        for (std::size_t j = 0; j < state.fields.size(); ++j)
            if (i != j)
                for (std::size_t n : domain.interior_nodes())
                    row.interaction += state.fields[i][n] * h[j][n] * vol;
    return row;
}

} // namespace

EvolveResult evolve(const ParabolicState& initial, const Problem& problem, const EvolveOptions& options)
{
    if (options.final_time < 0.0 || options.steady_tolerance < 0.0)
        throw Error("final time and steady tolerance must be nonnegative");
    if (!std::isfinite(options.final_time) && !(options.steady_tolerance > 0.0))
        throw Error("evolve needs a finite final time or a positive steady tolerance");

    EvolveResult result;
    result.state = initial;
    result.trace.push_back(make_row(problem, initial, 0.0, 0.0));

    ImexStepper stepper(problem, options.linear, options.threads);
    std::vector<MassBalance> balance;
    const double time_eps = 1e-12 * std::max(1.0, initial.dt);
    const int stride = std::max(1, options.trace_stride);
    while (result.state.time < options.final_time - time_eps) {
        if (result.steps >= options.max_steps)
            throw Error("parabolic step cap reached before the stopping criterion");
        ParabolicState current = result.state;
        const double nominal = current.dt;
        current.dt = std::min(nominal, options.final_time - current.time);
        ParabolicState next = stepper.step(current, &balance);
        next.dt = nominal;
        ++result.steps;

        const double delta = max_abs_difference(next.fields, current.fields);
        double defect = 0.0;
        for (const MassBalance& b : balance)
            defect = std::max(defect, b.relative_defect);
        result.max_mass_defect = std::max(result.max_mass_defect, defect);
        result.state = std::move(next);

        const bool steady = options.steady_tolerance > 0.0 && delta < options.steady_tolerance * current.dt;
        const bool last = steady || result.state.time >= options.final_time - time_eps;
        if (last || result.steps % stride == 0)
            result.trace.push_back(make_row(problem, result.state, delta, defect));
        if (steady) {
            result.reached_steady = true;
            break;
        }
    }
    return result;
}

} // namespace segsolve
