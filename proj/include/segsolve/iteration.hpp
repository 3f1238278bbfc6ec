#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "segsolve/domain.hpp"
#include "segsolve/elliptic.hpp"
#include "segsolve/nonlocal.hpp"

namespace segsolve {

/// Everything that defines one instance of the coupled system
///   Delta u_i = (1/eps) u_i sum_{j != i} H(u_j)  in Omega,
///   u_i = phi_i                                   on the collar.
struct Problem {
    Domain domain;
    BoundaryData boundary;
    KernelSpec kernel;
    double epsilon;

    std::size_t species_count() const { return boundary.species_count(); }
};

/// Advances all species from one frozen family: u_i^{k+1} solves
/// Delta u = c_i(u^k) u with the species' own collar data. Owns one linear
/// operator per species so the species solves can run on separate threads.
class PicardStepper {
public:
    PicardStepper(const Problem& problem, const LinearSolverOptions& linear, unsigned threads = 1);

    Species step(const Species& frozen);
    /// Harmonic extensions of the boundary data (the k = 0 iterate).
    Species harmonic();

    const Problem& problem() const { return *problem_; }
    const LinearSolveReport& last_report() const { return last_report_; }

private:
    const Problem* problem_;
    std::vector<ScreenedOperator> operators_;
    unsigned threads_;
    LinearSolveReport last_report_;
};

/// One Picard step with a throwaway stepper.
Species picard_step(const Problem& problem, const Species& frozen, const LinearSolverOptions& linear = {});

struct HistoryEntry {
    int k;
    Species fields;
};

/// Bounded iterate storage: the first `cap` iterates are kept, after that a
/// rolling window of the most recent four.
class IterateHistory {
public:
    explicit IterateHistory(std::size_t cap = 64) : cap_(cap) {}

    void push(int k, const Species& fields);
    /// Stored entries in increasing k.
    std::vector<HistoryEntry> entries() const;
    std::size_t size() const { return head_.size() + tail_.size(); }

private:
    std::size_t cap_;
    std::vector<HistoryEntry> head_;
    std::deque<HistoryEntry> tail_;
};

struct IterationRecord {
    int k;
    /// g_k = max_i ||u_i^k - u_i^{k-2}||_inf (zero for k < 2).
    double gap;
    /// max_i ||u_i^k - u_i^{k-1}||_inf, the even/odd gap.
    double step_change;
    std::vector<double> min_value;
    std::vector<double> max_value;
    std::vector<double> flux;
};

struct IterationState {
    int k = 0;
    Species current;
    Species previous;
    Species before_previous;
    /// Latest even (super) and odd (sub) iterates.
    Species even_candidate;
    Species odd_candidate;
    std::vector<IterationRecord> records;
    /// Indices k > 2 at which g_k exceeded g_{k-1}, with the increase.
    std::vector<std::pair<int, double>> gap_increases;
    IterateHistory history;
};

struct AuditViolation {
    enum class Kind { even_increase, odd_decrease, odd_above_even };
    Kind kind;
    std::size_t species;
    std::size_t node;
    int k_first;
    int k_second;
    double magnitude;
};

std::string to_string(AuditViolation::Kind kind);

struct AuditReport {
    std::size_t iterates_checked = 0;
    double slack = 0.0;
    std::vector<AuditViolation> violations;
    double max_violation = 0.0;

    bool clean() const { return violations.empty(); }
};

/// Checks the interleaving chain u^0 >= u^2 >= ... >= u^3 >= u^1 on stored
/// iterates: evens nonincreasing, odds nondecreasing, every odd below every
/// even. One violation is reported per (check, species, node), with the
/// worst offending pair of iterates.
AuditReport audit_interleaving(std::span<const HistoryEntry> history, double slack);

struct MonotoneOptions {
    double outer_tolerance = 1e-8;
    int max_iterations = 20000;
    std::size_t history_cap = 64;
    LinearSolverOptions linear{};
    unsigned threads = 1;
};

struct ResidualNorms {
    /// max |Delta_h u_i - (1/eps) u_i sum H(u_j)| over interior nodes.
    double raw = 0.0;
    /// Same, divided pointwise by the operator diagonal 2d/h^2 + c_i.
    double scaled = 0.0;
};

ResidualNorms nonlinear_residual(const Problem& problem, const Species& fields);

/// Discrete forms of the identities that close the existence argument,
/// evaluated on the final even/odd pair.
struct LimitChecks {
    /// sum_i outward flux of the even and odd candidates; even <= odd + slack.
    double even_flux = 0.0;
    double odd_flux = 0.0;
    /// sum_{i != j} sum_{x in Omega, y in collar} u_i(x) phi_j(y) K(x, y) h^{2d}.
    double even_strip = 0.0;
    double odd_strip = 0.0;
    double candidate_gap = 0.0;
};

LimitChecks limit_checks(const Problem& problem, const Species& even, const Species& odd);

struct Solution {
    Species fields;
    double epsilon = 0.0;
    KernelKind kernel = KernelKind::integral;
    int iterations = 0;
    double final_gap = 0.0;
    ResidualNorms residual;
    std::string method;
};

struct MonotoneRun {
    Solution solution;
    IterationState state;
    AuditReport audit;
    LimitChecks checks;
};

class IterationError : public Error {
public:
    IterationError(const std::string& what, std::vector<double> gaps) : Error(what), gaps(std::move(gaps)) {}
    std::vector<double> gaps;
};

/// Alternating screened solves from the harmonic extensions until the
/// even/odd gap drops below the outer tolerance. Returns the average of the
/// last even and odd iterates.
MonotoneRun run_monotone(const Problem& problem, const MonotoneOptions& options = {});

struct FixedPointOptions {
    double damping = 1.0;
    /// Stop once ||T(u) - u||_inf falls below this.
    double tolerance = 1e-11;
    int max_iterations = 50000;
    /// The damping is halved when the increment grows for `patience`
    /// consecutive steps; the solve fails below min_damping.
    double min_damping = 1.0 / 1024.0;
    int patience = 3;
    LinearSolverOptions linear{};
    unsigned threads = 1;
};

/// Damped Picard iteration u <- (1 - theta) u + theta T(u) from an arbitrary
/// nonnegative start. Independent of the monotone bookkeeping.
Solution solve_fixed_point(const Problem& problem, const Species& init, const FixedPointOptions& options = {});

struct SandwichReport {
    int k_odd = 0;
    int k_even = 0;
    /// max over species/nodes of (u^{odd} - w)^+ and (w - u^{even})^+.
    double below_violation = 0.0;
    double above_violation = 0.0;
    double slack = 0.0;
    bool holds() const { return below_violation <= slack && above_violation <= slack; }
};

/// Checks u^{2k+1} <= w <= u^{2k} against the last stored even/odd iterates.
SandwichReport check_sandwich(const IterationState& state, const Species& w, double slack);

/// Species with the boundary data on the collar and `scale` times the
/// harmonic extension (or the constant `value`) inside.
Species scaled_harmonic_start(const Problem& problem, double scale, const LinearSolverOptions& linear = {});
Species constant_start(const Problem& problem, double value);

} // namespace segsolve
