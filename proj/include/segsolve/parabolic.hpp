#pragma once

#include <limits>
#include <vector>

#include "segsolve/iteration.hpp"

namespace segsolve {

struct ParabolicState {
    double time = 0.0;
    Species fields;
    double dt = 0.0;
};

/// Per-step bookkeeping of the discrete mass balance
///   sum (u^{n+1} - u^n) h^d / dt = flux(u^{n+1}) - sum c u^{n+1} h^d.
struct MassBalance {
    double lhs = 0.0;
    double rhs = 0.0;
    /// |lhs - rhs| / max(|lhs|, |rhs|, |flux|, tiny).
    double relative_defect = 0.0;
};

/// Implicit diffusion with the reaction coefficient frozen at the old time
/// level: (I/dt - Delta + c_i(u^n)) u_i^{n+1} = u_i^n / dt.
class ImexStepper {
public:
    ImexStepper(const Problem& problem, const LinearSolverOptions& linear, unsigned threads = 1);

    /// `balance`, when given, receives one entry per species.
    ParabolicState step(const ParabolicState& state, std::vector<MassBalance>* balance = nullptr);

private:
    const Problem* problem_;
    std::vector<ScreenedOperator> operators_;
    unsigned threads_;
};

ParabolicState imex_step(const ParabolicState& state, const Problem& problem,
                         const LinearSolverOptions& linear = {});

/// Initial state with the collar values replaced by the boundary data.
/// Flags interior negativity with an Error; `collar_mismatch` receives the
/// largest change made to the collar.
ParabolicState make_initial_state(const Problem& problem, Species initial, double dt,
                                  double* collar_mismatch = nullptr);

struct TraceRow {
    double time;
    std::vector<double> mass;
    double interaction;
    /// max_i ||u_i^{n+1} - u_i^n||_inf
    double delta;
    double mass_defect;
};

struct EvolveOptions {
    /// Stop at this time; infinite means run until steady.
    double final_time = std::numeric_limits<double>::infinity();
    /// Stop once delta < steady_tolerance * dt (0 disables the test).
    double steady_tolerance = 0.0;
    int max_steps = 10'000'000;
    /// Keep every n-th step in the trace (the last step is always kept).
    int trace_stride = 1;
    LinearSolverOptions linear{};
    unsigned threads = 1;
};

struct EvolveResult {
    ParabolicState state;
    std::vector<TraceRow> trace;
    bool reached_steady = false;
    int steps = 0;
    double max_mass_defect = 0.0;
};

EvolveResult evolve(const ParabolicState& initial, const Problem& problem, const EvolveOptions& options);

} // namespace segsolve
