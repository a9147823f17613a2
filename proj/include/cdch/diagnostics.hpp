// diagnostics.hpp
// Per-step structure measurements: energy dissipation quadratic form,
// conservation defects, positivity, optimality residual, and log-linear
// rate fitting for the time series.

#ifndef CDCH_DIAGNOSTICS_HPP
#define CDCH_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "cdch/mesh.hpp"
#include "cdch/model.hpp"
#include "cdch/state.hpp"

namespace cdch {

struct StepDiagnostics {
    long step = 0;
    double time = 0.0;
    double dt = 0.0;
    EnergyBreakdown energy;
    double dissipation = 0.0;     // NaN when undefined (non-positive cells)
    std::vector<double> masses;   // per species
    double min_u = 0.0, max_u = 0.0;
    double vf_defect = 0.0;       // max_K |sum_i U_{i,K} - 1|
    double el_residual = 0.0;     // NaN when u0 is not strictly inside (0,1)
    double relative_energy = 0.0; // NaN until a reference is known
    double energy_slack = 0.0;    // E_next - E_prev + dt * dissipation
    int newton_iters = 0;
};

/// Edge sum of tau (D mu)^T M(U_sigma) (D mu), evaluated as the manifestly
/// nonnegative pairwise form sum_{i<j} K_ij U_i,sigma U_j,sigma (D mu_i - D mu_j)^2.
/// Returns NaN when any cell value of u_next is <= 0 (potentials undefined).
double dissipation(const Mesh& mesh, const ModelParams& params, const State& u_next,
                   const State& u_prev);

struct RateFit {
    double rate = 0.0; // negated least-squares slope of ln(values) vs times
    double r_squared = 0.0;
};

/// Least-squares fit of ln(values) against times. Requires at least three
/// strictly positive values.
RateFit fit_exponential_rate(const std::vector<double>& times,
                             const std::vector<double>& values);

/// Measure one accepted step. Pure measurement: nothing is enforced, all
/// defects are reported as magnitudes. The relative energy is filled when a
/// reference state is supplied, otherwise left NaN for post-processing.
StepDiagnostics check_step(const Mesh& mesh, const ModelParams& params, const State& prev,
                           const State& next, double dt, long step, int newton_iters,
                           const State* reference);

struct Violation {
    long step = 0;
    std::string what;
    double magnitude = 0.0;
};

/// Scan a diagnostics series against the structural invariants: per-species
/// mass drift, positivity, volume filling, nonnegative dissipation, and the
/// per-step energy inequality with slack tol_slack_coef * (1 + |E_prev|).
std::vector<Violation> scan_invariants(const std::vector<StepDiagnostics>& series,
                                       double mass_tol = 1e-9, double vf_tol = 1e-9,
                                       double tol_slack_coef = 1e-10);

} // namespace cdch

#endif
