#include "cdch/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cdch {

AdvanceResult advance(const Mesh& mesh, const ModelParams& params, const State& u,
                      double dt_try, const SolverConfig& config, NewtonWorkspace* workspace) {
    config.validate();
    double dt = std::min(dt_try, config.dt_max);
    int retries = 0;
    double last_residual = std::numeric_limits<double>::quiet_NaN();
    while (dt >= config.dt_min) {
        NewtonResult nr = newton_solve(mesh, params, u, dt, config, workspace);
        if (nr.converged()) {
            AdvanceResult out;
            out.state = std::move(*nr.state);
            out.state.time = u.time + dt;
            out.dt_used = dt;
            out.dt_next = std::min(dt * config.dt_grow, config.dt_max);
            out.newton_iters = nr.iterations;
            out.retries = retries;
            return out;
        }
        last_residual = nr.residual_norm;
        dt *= config.dt_shrink;
        ++retries;
    }
    throw SolverAbort("time step fell below dt_min after repeated Newton failures",
                      last_residual);
}

Trajectory run(const Mesh& mesh, const ModelParams& params, const State& initial,
               const SolverConfig& config, const RunOptions& options) {
    if (options.t_end < initial.time)
        throw std::invalid_argument("run: t_end must not precede the initial time");

    Trajectory traj;
    traj.initial = initial;
    traj.initial_masses = masses_of(mesh, initial);

    State reference;
    const State* reference_ptr = nullptr;
    if (options.reference == ReferenceKind::kConstantSteadyState) {
        reference = constant_steady_state(mesh, params);
        reference_ptr = &reference;
    }

    traj.steps.push_back(
        check_step(mesh, params, initial, initial, 0.0, 0, 0, reference_ptr));
    if (options.store_all_states) traj.states.push_back(initial);

    std::vector<double> pending = options.snapshot_times;
    std::sort(pending.begin(), pending.end());
    auto take_snapshots = [&](const State& s) {
        while (!pending.empty() && s.time >= pending.front() - 1e-12) {
            traj.snapshots.emplace_back(pending.front(), s);
            pending.erase(pending.begin());
        }
    };
    take_snapshots(initial);

    NewtonWorkspace workspace;
    State current = initial;
    double dt_next = config.dt_max;
    long step = 0;
    const double horizon = options.t_end;
    const double t_eps = 1e-14 * std::max(1.0, std::abs(horizon));
    while (current.time < horizon - t_eps) {
        const double remaining = horizon - current.time;
        if (remaining < config.dt_min) break; // below the resolvable step size
        const double dt_cap = std::min(dt_next, remaining);
        AdvanceResult adv = advance(mesh, params, current, dt_cap, config, &workspace);
        ++step;
        StepDiagnostics d = check_step(mesh, params, current, adv.state, adv.dt_used, step,
                                       adv.newton_iters, reference_ptr);
        current = std::move(adv.state);
        dt_next = adv.dt_next;
        take_snapshots(current);
        if (options.on_step) options.on_step(current, d);
        traj.steps.push_back(std::move(d));
        if (options.store_all_states) traj.states.push_back(current);
    }
    traj.final_state = current;

    if (options.reference == ReferenceKind::kFinalState) {
        const double e_final = traj.steps.back().energy.e_total;
        for (auto& d : traj.steps) d.relative_energy = d.energy.e_total - e_final;
    }
    return traj;
}

} // namespace cdch
