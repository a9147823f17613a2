// model.hpp
// Model parameters and the algebra attached to the free energy: mobility
// matrix, logarithmic mean, discrete energy with its convex-concave split,
// chemical potentials, constant steady state, convexity/stability report.

#ifndef CDCH_MODEL_HPP
#define CDCH_MODEL_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdch/mesh.hpp"
#include "cdch/state.hpp"

namespace cdch {

struct ModelParams {
    int n_species = 0;      // n + 1 >= 2
    double epsilon = 0.0;   // gradient-energy coefficient
    double beta = 0.0;      // demixing coefficient
    Eigen::MatrixXd coeffs; // symmetric cross-diffusion coefficients K_ij; diagonal unused
    std::vector<double> masses;

    /// k := min_{i != j} K_ij.
    double min_offdiag() const;

    /// Symmetry, positivity of the off-diagonal coefficients, positive
    /// masses; when a domain measure is given, masses must sum to it.
    void validate(double domain_measure = 0.0) const;
};

struct EnergyBreakdown {
    double e_conv = 0.0; // Boltzmann + gradient part
    double e_conc = 0.0; // concave beta part
    double e_total = 0.0;
};

struct StabilityReport {
    double convexity_margin = 0.0;        // n >= 2 condition, left-hand side
    double convexity_margin_binary = 0.0; // n = 1 variant
    bool globally_stable = false;         // epsilon/(2 C_p) - beta > 0
    double lambda = 0.0;                  // decay rate; NaN when not globally stable
    double c_p = 0.0;
    double c_sob = 0.0;

    /// Flat "name = value" text block.
    std::string to_text() const;
};

/// Logarithmic mean: 0 if min(a,b) <= 0, a if a == b > 0, else
/// (a - b)/(ln a - ln b). Total on finite inputs; rejects NaN.
double log_mean(double a, double b);

/// Partial derivatives of log_mean, matching its branches: zero where the
/// mean is identically zero, 1/2 each at a = b > 0.
struct LogMeanPartials {
    double da = 0.0;
    double db = 0.0;
};
LogMeanPartials log_mean_partials(double a, double b);

/// Mobility matrix M(u): M_ij = -K_ij u_i u_j, M_ii = sum_{k != i} K_ik u_i u_k.
Eigen::MatrixXd mobility(const ModelParams& params, const std::vector<double>& u);

/// Discrete free energy. Boltzmann terms use the convention 0 ln 0 = 0;
/// negative entries are rejected (the scheme guarantees positivity, so a
/// negative value indicates solver failure).
EnergyBreakdown discrete_energy(const Mesh& mesh, const ModelParams& params, const State& u);

/// E_total(u) - E_total(u_ref).
double relative_energy(const Mesh& mesh, const ModelParams& params, const State& u,
                       const State& u_ref);

/// W0^{p+1/2}: implicit discrete Laplacian of u0_next plus the explicit
/// concave term beta (1 - 2 u0_prev).
CellField w0_half(const Mesh& mesh, const ModelParams& params, const CellField& u0_next,
                  const CellField& u0_prev);

/// Chemical potentials: mu_i = ln U_i for i >= 1, mu_0 = ln U_0 + W0^{p+1/2}.
/// Requires u_next strictly positive.
std::vector<CellField> chemical_potentials(const Mesh& mesh, const ModelParams& params,
                                           const State& u_next, const State& u_prev);

/// Constant state u_i = m_i / |Omega|. Requires positive masses summing to
/// the domain measure.
State constant_steady_state(const Mesh& mesh, const ModelParams& params);

/// Convexity margins, global-stability flag and the decay rate
/// lambda = 4 k min(1/C_sob, 1/C_p - 2 beta/epsilon).
StabilityReport stability_report(const ModelParams& params, double domain_measure, double c_p,
                                 double c_sob);

} // namespace cdch

#endif
