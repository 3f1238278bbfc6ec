#include "segsolve/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segsolve/parallel.hpp"

namespace segsolve {

PicardStepper::PicardStepper(const Problem& problem, const LinearSolverOptions& linear, unsigned threads)
    : problem_(&problem), threads_(std::max(1u, threads))
{
    if (!(problem.epsilon > 0.0))
        throw Error("epsilon must be positive");
    operators_.reserve(problem.species_count());
    for (std::size_t i = 0; i < problem.species_count(); ++i)
        operators_.emplace_back(problem.domain, linear);
}

Species PicardStepper::harmonic()
{
    const Problem& p = *problem_;
    Species out(p.species_count());
    std::vector<LinearSolveReport> reports(p.species_count());
    const Field zero = p.domain.make_field();
    parallel_for(p.species_count(), threads_, [&](std::size_t i) {
        out[i] = operators_[i].solve(zero, p.boundary.species(i), nullptr, &reports[i]);
    });
    if (!reports.empty())
        last_report_ = reports.back();
    return out;
}

Species PicardStepper::step(const Species& frozen)
{
    const Problem& p = *problem_;
    const std::size_t m = p.species_count();
    std::vector<Field> h(m);
    parallel_for(m, threads_, [&](std::size_t j) { h[j] = apply_kernel(frozen[j], p.domain, p.kernel); });

    Species out(m);
    std::vector<LinearSolveReport> reports(m);
    parallel_for(m, threads_, [&](std::size_t i) {
        const Field c = interaction_coefficient_from(h, i, p.epsilon, p.domain);
        out[i] = operators_[i].solve(c, p.boundary.species(i), nullptr, &reports[i]);
    });
    if (!reports.empty())
        last_report_ = *std::max_element(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
            return a.relative_residual < b.relative_residual;
        });
    return out;
}

Species picard_step(const Problem& problem, const Species& frozen, const LinearSolverOptions& linear)
{
    PicardStepper stepper(problem, linear);
    return stepper.step(frozen);
}

void IterateHistory::push(int k, const Species& fields)
{
    if (head_.size() < cap_) {
        head_.push_back({k, fields});
        return;
    }
    tail_.push_back({k, fields});
    if (tail_.size() > 4)
        tail_.pop_front();
}

std::vector<HistoryEntry> IterateHistory::entries() const
{
    std::vector<HistoryEntry> out(head_.begin(), head_.end());
    out.insert(out.end(), tail_.begin(), tail_.end());
    return out;
}

std::string to_string(AuditViolation::Kind kind)
{
    switch (kind) {
    case AuditViolation::Kind::even_increase:
        return "even_increase";
    case AuditViolation::Kind::odd_decrease:
        return "odd_decrease";
    case AuditViolation::Kind::odd_above_even:
        return "odd_above_even";
    }
    return "unknown";
}

AuditReport audit_interleaving(std::span<const HistoryEntry> history, double slack)
{
    AuditReport report;
    report.iterates_checked = history.size();
    report.slack = slack;
    if (history.empty())
        return report;

    std::vector<const HistoryEntry*> evens;
    std::vector<const HistoryEntry*> odds;
    for (const HistoryEntry& e : history)
        (e.k % 2 == 0 ? evens : odds).push_back(&e);

    const std::size_t m = history.front().fields.size();
    const std::size_t nodes = m ? history.front().fields.front().size() : 0;

    auto record = [&](AuditViolation::Kind kind, std::size_t s, std::size_t n, int a, int b, double mag) {
        report.violations.push_back({kind, s, n, a, b, mag});
        report.max_violation = std::max(report.max_violation, mag);
    };

    for (std::size_t s = 0; s < m; ++s) {
        for (std::size_t n = 0; n < nodes; ++n) {
            // Evens must not increase between consecutive stored entries.
            double worst = 0.0;
            int wa = 0, wb = 0;
            for (std::size_t q = 1; q < evens.size(); ++q) {
                const double inc = evens[q]->fields[s][n] - evens[q - 1]->fields[s][n];
                if (inc > worst) {
                    worst = inc;
                    wa = evens[q - 1]->k;
                    wb = evens[q]->k;
                }
            }
            if (worst > slack)
                record(AuditViolation::Kind::even_increase, s, n, wa, wb, worst);

            worst = 0.0;
            for (std::size_t q = 1; q < odds.size(); ++q) {
                const double dec = odds[q - 1]->fields[s][n] - odds[q]->fields[s][n];
                if (dec > worst) {
                    worst = dec;
                    wa = odds[q - 1]->k;
                    wb = odds[q]->k;
                }
            }
            if (worst > slack)
                record(AuditViolation::Kind::odd_decrease, s, n, wa, wb, worst);

            // Every odd below every even: compare the largest odd value with
            // the smallest even value.
            if (!evens.empty() && !odds.empty()) {
                const HistoryEntry* lo = evens.front();
                for (const HistoryEntry* e : evens)
                    if (e->fields[s][n] < lo->fields[s][n])
                        lo = e;
                const HistoryEntry* hi = odds.front();
                for (const HistoryEntry* o : odds)
                    if (o->fields[s][n] > hi->fields[s][n])
                        hi = o;
                const double excess = hi->fields[s][n] - lo->fields[s][n];
                if (excess > slack)
                    record(AuditViolation::Kind::odd_above_even, s, n, hi->k, lo->k, excess);
            }
        }
    }
    return report;
}

ResidualNorms nonlinear_residual(const Problem& problem, const Species& fields)
{
    const Domain& domain = problem.domain;
    const std::size_t m = fields.size();
    std::vector<Field> h(m);
    for (std::size_t j = 0; j < m; ++j)
        h[j] = apply_kernel(fields[j], domain, problem.kernel);

    const double diag = 2.0 * domain.dimension() / (domain.spacing() * domain.spacing());
    ResidualNorms out;
    for (std::size_t i = 0; i < m; ++i) {
        const Field lap = discrete_laplacian(fields[i], domain);
        const Field c = interaction_coefficient_from(h, i, problem.epsilon, domain);
        for (std::size_t n : domain.interior_nodes()) {
            const double r = std::abs(lap[n] - c[n] * fields[i][n]);
            out.raw = std::max(out.raw, r);
            out.scaled = std::max(out.scaled, r / (diag + c[n]));
        }
    }
    return out;
}

namespace {

double strip_sum(const Problem& problem, const Species& fields)
{
    const Domain& domain = problem.domain;
    const auto offsets = problem.kernel.flat_offsets();
    const double w = problem.kernel.offsets().weight();
    double total = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (i == j)
                continue;
            const Field& phi = problem.boundary.species(j);
            for (std::size_t n : domain.interior_nodes()) {
                double local = 0.0;
                for (std::ptrdiff_t off : offsets) {
                    const auto y = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n) + off);
                    if (domain.kind(y) == NodeKind::collar)
                        local += phi[y];
                }
                total += fields[i][n] * local * w * w;
            }
        }
    }
    return total;
}

Species average(const Species& a, const Species& b)
{
    Species out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t n = 0; n < out[i].size(); ++n)
            out[i][n] = 0.5 * (a[i][n] + b[i][n]);
    return out;
}

IterationRecord make_record(int k, const Species& current, const Species& previous,
                            const Species& before_previous, const Domain& domain)
{
    IterationRecord r;
    r.k = k;
    r.gap = k >= 2 ? max_abs_difference(current, before_previous) : 0.0;
    r.step_change = k >= 1 ? max_abs_difference(current, previous) : 0.0;
    for (const Field& u : current) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t n : domain.interior_nodes()) {
            lo = std::min(lo, u[n]);
            hi = std::max(hi, u[n]);
        }
        r.min_value.push_back(lo);
        r.max_value.push_back(hi);
        r.flux.push_back(boundary_flux_total(u, domain));
    }
    return r;
}

} // namespace

LimitChecks limit_checks(const Problem& problem, const Species& even, const Species& odd)
{
    LimitChecks c;
    for (const Field& u : even)
        c.even_flux += boundary_flux_total(u, problem.domain);
    for (const Field& u : odd)
        c.odd_flux += boundary_flux_total(u, problem.domain);
    c.even_strip = strip_sum(problem, even);
    c.odd_strip = strip_sum(problem, odd);
    c.candidate_gap = max_abs_difference(even, odd);
    return c;
}

MonotoneRun run_monotone(const Problem& problem, const MonotoneOptions& options)
{
    if (!(options.outer_tolerance > 0.0))
        throw Error("outer tolerance must be positive");
    PicardStepper stepper(problem, options.linear, options.threads);

    MonotoneRun run;
    IterationState& st = run.state;
    st.history = IterateHistory(options.history_cap);
    st.current = stepper.harmonic();
    st.even_candidate = st.current;
    st.records.push_back(make_record(0, st.current, st.current, st.current, problem.domain));
    st.history.push(0, st.current);

    std::vector<double> gaps;
    while (true) {
        if (st.k >= options.max_iterations)
            throw IterationError("monotone iteration cap of " + std::to_string(options.max_iterations) +
                                     " reached with gap " + std::to_string(gaps.empty() ? 0.0 : gaps.back()),
                                 gaps);
        Species next = stepper.step(st.current);
        st.before_previous = std::move(st.previous);
        st.previous = std::move(st.current);
        st.current = std::move(next);
        ++st.k;
        (st.k % 2 == 0 ? st.even_candidate : st.odd_candidate) = st.current;
        IterationRecord rec = make_record(st.k, st.current, st.previous, st.before_previous, problem.domain);
        if (st.records.size() >= 3 && st.k > 2) {
            const double prev_gap = st.records.back().gap;
            if (rec.gap > prev_gap)
                st.gap_increases.emplace_back(st.k, rec.gap - prev_gap);
        }
        gaps.push_back(rec.step_change);
        const double change = rec.step_change;
        st.records.push_back(std::move(rec));
        st.history.push(st.k, st.current);
        if (change < options.outer_tolerance)
            break;
    }

    run.checks = limit_checks(problem, st.even_candidate, st.odd_candidate);
    const auto entries = st.history.entries();
    run.audit = audit_interleaving(entries, 10.0 * options.linear.tolerance);

    Solution& sol = run.solution;
    sol.fields = average(st.even_candidate, st.odd_candidate);
    sol.epsilon = problem.epsilon;
    sol.kernel = problem.kernel.kind();
    sol.iterations = st.k;
    sol.final_gap = st.records.back().step_change;
    sol.residual = nonlinear_residual(problem, sol.fields);
    sol.method = "monotone";
    return run;
}

Solution solve_fixed_point(const Problem& problem, const Species& init, const FixedPointOptions& options)
{
    if (!(options.damping > 0.0 && options.damping <= 1.0))
        throw Error("damping must lie in (0, 1]");
    if (init.size() != problem.species_count())
        throw Error("initial family has the wrong species count");
    const Domain& domain = problem.domain;

    Species u = init;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i].size() != domain.node_count())
            throw Error("initial field size does not match the domain");
        for (std::size_t n : domain.interior_nodes())
            if (!(u[i][n] >= 0.0))
                throw Error("initial family must be nonnegative");
        for (std::size_t n : domain.collar_nodes())
            u[i][n] = problem.boundary.species(i)[n];
    }

    PicardStepper stepper(problem, options.linear, options.threads);
    double theta = options.damping;
    double previous_increment = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        Species t = stepper.step(u);
        const double increment = max_abs_difference(t, u);
        if (!std::isfinite(increment))
            throw IterationError("fixed-point iteration produced non-finite values", {});
        if (increment < options.tolerance) {
            Solution sol;
            sol.fields = std::move(t);
            sol.epsilon = problem.epsilon;
            sol.kernel = problem.kernel.kind();
            sol.iterations = it;
            sol.final_gap = increment;
            sol.residual = nonlinear_residual(problem, sol.fields);
            sol.method = "fixed_point";
            return sol;
        }
        growth = increment > previous_increment ? growth + 1 : 0;
        if (growth >= options.patience) {
            theta *= 0.5;
            growth = 0;
            if (theta < options.min_damping)
                throw IterationError("fixed-point iteration oscillates below the minimum damping", {});
        }
        previous_increment = increment;
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t n : domain.interior_nodes())
                u[i][n] = (1.0 - theta) * u[i][n] + theta * t[i][n];
    }
    throw IterationError("fixed-point iteration cap reached", {});
}

SandwichReport check_sandwich(const IterationState& state, const Species& w, double slack)
{
    SandwichReport r;
    r.slack = slack;
    r.k_even = state.k % 2 == 0 ? state.k : state.k - 1;
    r.k_odd = state.k % 2 == 1 ? state.k : state.k - 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t n = 0; n < w[i].size(); ++n) {
            if (!state.odd_candidate.empty())
                r.below_violation = std::max(r.below_violation, state.odd_candidate[i][n] - w[i][n]);
            r.above_violation = std::max(r.above_violation, w[i][n] - state.even_candidate[i][n]);
        }
    }
    return r;
}

Species scaled_harmonic_start(const Problem& problem, double scale, const LinearSolverOptions& linear)
{
    PicardStepper stepper(problem, linear);
    Species u = stepper.harmonic();
    for (Field& f : u)
        for (std::size_t n : problem.domain.interior_nodes())
            f[n] *= scale;
    return u;
}

Species constant_start(const Problem& problem, double value)
{
    Species u;
    for (std::size_t i = 0; i < problem.species_count(); ++i) {
        Field f = problem.boundary.species(i);
        for (std::size_t n : problem.domain.interior_nodes())
            f[n] = value;
        u.push_back(std::move(f));
    }
    return u;
}

} // namespace segsolve
