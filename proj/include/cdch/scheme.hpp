// scheme.hpp
// The implicit finite-volume time step: log-mean edge fractions, discrete
// fluxes in conservative and entropic form, the backward Euler residual, its
// analytic Jacobian, and the Newton solve.

#ifndef CDCH_SCHEME_HPP
#define CDCH_SCHEME_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "cdch/mesh.hpp"
#include "cdch/model.hpp"
#include "cdch/state.hpp"

namespace cdch {

/// Per-edge, per-species logarithmic-mean fractions U_{i,sigma};
/// independent of the viewing cell.
struct EdgeFractions {
    // values[i][e] for species i and interior edge e
    std::vector<std::vector<double>> values;
};

/// Oriented fluxes J_{i,K sigma} viewed from the owner cell of each interior
/// edge; the mirror view is the negation.
struct FluxSet {
    // flux[i][e] for species i and interior edge e
    std::vector<std::vector<double>> flux;

    /// sum over species of the flux through edge e (zero by construction).
    double species_sum(int e) const;
};

struct SolverConfig {
    double newton_tol = 1e-10; // infinity norm of the Newton update
    int newton_max_iter = 50;
    double dt_max = 1e-3;
    double dt_min = 1e-12;
    double dt_grow = 1.2;
    double dt_shrink = 0.5;
    // divergence guard: reject iterates outside this box
    double guard_lo = -0.1;
    double guard_hi = 1.1;

    void validate() const;
};

using ProfileFn = std::function<double(const std::array<double, 2>&)>;

/// Cell averages of pointwise profiles by the midpoint rule. Rejects
/// evaluated values outside [0, 1].
State project_initial(const std::vector<ProfileFn>& profiles, const Mesh& mesh);

EdgeFractions edge_fractions(const Mesh& mesh, const State& u);

/// Discrete fluxes of the scheme: cross-diffusion jump terms plus the
/// Cahn-Hilliard coupling through W0^{p+1/2}(u_next, u_prev).
FluxSet fluxes(const Mesh& mesh, const ModelParams& params, const State& u_next,
               const State& u_prev);

/// Entropic rewriting J_i = -tau sum_j K_ij U_i,sigma U_j,sigma D(mu_i - mu_j).
/// Algebraically identical to fluxes() on strictly positive states through the
/// discrete chain rule; kept as an independent cross-validation route.
FluxSet fluxes_entropic(const Mesh& mesh, const ModelParams& params, const State& u_next,
                        const State& u_prev);

/// Backward Euler conservation residual, all species and cells; component
/// (cell, species) at index cell * n_species + species.
Eigen::VectorXd residual(const Mesh& mesh, const ModelParams& params, const State& u_next,
                         const State& u_prev, double dt);

/// Exact Jacobian of residual() with respect to u_next, including the
/// log-mean partials and the W0 coupling (a two-cell-ring stencil).
Eigen::SparseMatrix<double> jacobian(const Mesh& mesh, const ModelParams& params,
                                     const State& u_next, const State& u_prev, double dt);

struct NewtonResult {
    std::optional<State> state; // engaged on convergence
    int iterations = 0;
    double update_norm = 0.0;
    double residual_norm = 0.0;
    std::string failure; // empty on success

    bool converged() const { return state.has_value(); }
};

/// Reusable factorization workspace; the sparsity pattern is fixed by the
/// mesh, so the symbolic analysis can be shared across steps.
struct NewtonWorkspace {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    bool pattern_ready = false;
};

/// Newton iteration for one implicit step, starting from u_prev. Fails after
/// newton_max_iter iterations, on a singular linear solve, or when an iterate
/// leaves the guard box.
NewtonResult newton_solve(const Mesh& mesh, const ModelParams& params, const State& u_prev,
                          double dt, const SolverConfig& config,
                          NewtonWorkspace* workspace = nullptr);

inline int unknown_index(int n_species, int cell, int species) {
    return cell * n_species + species;
}

} // namespace cdch

#endif
