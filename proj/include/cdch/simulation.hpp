// simulation.hpp
// Adaptive time loop over the implicit scheme: grow the step on Newton
// success, shrink and retry on failure, abort below dt_min.

#ifndef CDCH_SIMULATION_HPP
#define CDCH_SIMULATION_HPP

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cdch/diagnostics.hpp"
#include "cdch/scheme.hpp"

namespace cdch {

class SolverAbort : public std::runtime_error {
public:
    SolverAbort(const std::string& msg, double residual)
        : std::runtime_error(msg), last_residual_norm(residual) {}
    double last_residual_norm;
};

struct AdvanceResult {
    State state;
    double dt_used = 0.0;
    double dt_next = 0.0; // proposal for the next attempt
    int newton_iters = 0;
    int retries = 0;
};

/// One accepted step starting from dt_try (capped at dt_max); halves the
/// step on Newton failure and throws SolverAbort below dt_min.
AdvanceResult advance(const Mesh& mesh, const ModelParams& params, const State& u,
                      double dt_try, const SolverConfig& config,
                      NewtonWorkspace* workspace = nullptr);

enum class ReferenceKind {
    kConstantSteadyState, // RE against u_i = m_i/|Omega|
    kFinalState,          // RE against the final state, filled in after the run
};

struct RunOptions {
    double t_end = 0.0;
    ReferenceKind reference = ReferenceKind::kConstantSteadyState;
    std::vector<double> snapshot_times;
    bool store_all_states = false;
    std::function<void(const State&, const StepDiagnostics&)> on_step;
};

struct Trajectory {
    std::vector<StepDiagnostics> steps; // index 0 is the initial snapshot row
    State initial;
    State final_state;
    std::vector<std::pair<double, State>> snapshots; // (requested time, state)
    std::vector<State> states;                       // only when store_all_states
    std::vector<double> initial_masses;
};

/// Run the scheme until t_end, recording diagnostics for every accepted
/// step. params.masses must be consistent with the initial state (they feed
/// the constant reference state). Propagates SolverAbort.
Trajectory run(const Mesh& mesh, const ModelParams& params, const State& initial,
               const SolverConfig& config, const RunOptions& options);

} // namespace cdch

#endif
