// stationary.hpp
// Critical points of the constrained energy: the decoupled scalar equation
// for the separating species (a semilinear Neumann problem with a mass
// constraint) and the proportionality reconstruction of the other species.

#ifndef CDCH_STATIONARY_HPP
#define CDCH_STATIONARY_HPP

#include "cdch/mesh.hpp"
#include "cdch/model.hpp"
#include "cdch/state.hpp"

namespace cdch {

struct StationarySolution {
    CellField u0;
    double multiplier = 0.0;    // spatial mean of the nonlinearity
    State species;              // full state via the proportionality law
    double residual_norm = 0.0; // inf norm of the mean-subtracted residual
    double delta = 0.0;         // observed min distance of any species to {0, 1}
    int iterations = 0;
};

/// Cellwise residual of the optimality equation in mean-subtracted form:
/// -eps Lap_T u0 - f(u0) + mean_m(f(u0)), f(v) = ln((1-v)/v) - beta(1-2v).
/// Its m_K-weighted mean vanishes by construction. Requires u0 strictly
/// inside (0, 1); m0 is part of the interface but does not enter the formula.
CellField el_residual_field(const Mesh& mesh, const ModelParams& params, const CellField& u0,
                            double m0);

/// Damped Newton solve of the augmented system (cell equations with a scalar
/// multiplier, plus the mass constraint). Iterates are kept strictly inside
/// (gamma, 1 - gamma) by scaling the step. Outputs are critical points, not
/// certified minimizers.
StationarySolution solve_stationary(const Mesh& mesh, const ModelParams& params, double m0,
                                    const CellField& guess);

/// u_i = m_i / (|Omega| - m0) (1 - u0) for i >= 1; the last species is the
/// per-cell complement, so the sums are exactly 1.
State reconstruct_species(const CellField& u0, const ModelParams& params,
                          double domain_measure);

} // namespace cdch

#endif
