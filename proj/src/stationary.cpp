#include "cdch/stationary.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace cdch {

namespace {

constexpr double kGamma = 1e-12;     // box margin for the damped iterates
constexpr double kResidualTol = 1e-10;
constexpr int kMaxIterations = 100;

// f(v) = ln((1-v)/v) - beta (1 - 2v); singular at the box boundary.
double nonlinearity(double v, double beta) {
    return std::log((1.0 - v) / v) - beta * (1.0 - 2.0 * v);
}

double nonlinearity_prime(double v, double beta) {
    return -1.0 / (v * (1.0 - v)) + 2.0 * beta;
}

void require_interior(const CellField& u0) {
    for (double v : u0)
        if (!(v > 0.0) || !(v < 1.0))
            throw std::domain_error("stationary: u0 must lie strictly inside (0,1)");
}

CellField neumann_laplacian(const Mesh& mesh, const CellField& u0) {
    CellField lap(mesh.n_cells(), 0.0);
    for (const auto& ie : mesh.interior_edges) {
        const double flux = ie.tau * (u0[ie.l] - u0[ie.k]);
        lap[ie.k] += flux;
        lap[ie.l] -= flux;
    }
    for (int c = 0; c < mesh.n_cells(); ++c) lap[c] /= mesh.cell_measure[c];
    return lap;
}

} // namespace

CellField el_residual_field(const Mesh& mesh, const ModelParams& params, const CellField& u0,
                            double /*m0*/) {
    if (static_cast<int>(u0.size()) != mesh.n_cells())
        throw std::invalid_argument("el_residual_field: field does not match mesh");
    require_interior(u0);
    const CellField lap = neumann_laplacian(mesh, u0);
    CellField f(mesh.n_cells());
    double mean = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        f[c] = nonlinearity(u0[c], params.beta);
        mean += mesh.cell_measure[c] * f[c];
    }
    mean /= mesh.domain_measure;
    CellField r(mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c)
        r[c] = -params.epsilon * lap[c] - f[c] + mean;
    return r;
}

StationarySolution solve_stationary(const Mesh& mesh, const ModelParams& params, double m0,
                                    const CellField& guess) {
    if (!(m0 > 0.0) || !(m0 < mesh.domain_measure))
        throw std::invalid_argument("solve_stationary: need 0 < m0 < |Omega|");
    if (static_cast<int>(guess.size()) != mesh.n_cells())
        throw std::invalid_argument("solve_stationary: guess does not match mesh");
    require_interior(guess);

    const int n = mesh.n_cells();
    const double eps = params.epsilon;

    // unknowns: u0 per cell plus the multiplier in the last slot
    Eigen::VectorXd z(n + 1);
    for (int c = 0; c < n; ++c) z[c] = guess[c];
    z[n] = 0.0;
    {
        // start the multiplier at the weighted mean of the nonlinearity
        double mean = 0.0;
        for (int c = 0; c < n; ++c)
            mean += mesh.cell_measure[c] * nonlinearity(guess[c], params.beta);
        z[n] = mean / mesh.domain_measure;
    }

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool analyzed = false;

    StationarySolution out;
    for (int it = 1; it <= kMaxIterations; ++it) {
        out.iterations = it;
        CellField u0(n);
        for (int c = 0; c < n; ++c) u0[c] = z[c];
        const CellField lap = neumann_laplacian(mesh, u0);

        Eigen::VectorXd g(n + 1);
        double mass = 0.0;
        for (int c = 0; c < n; ++c) {
            g[c] = -eps * lap[c] - nonlinearity(u0[c], params.beta) + z[n];
            mass += mesh.cell_measure[c] * u0[c];
        }
        g[n] = mass - m0;

        const CellField diag_res = el_residual_field(mesh, params, u0, m0);
        double el_norm = 0.0;
        for (double v : diag_res) el_norm = std::max(el_norm, std::abs(v));
        const double g_norm = g.lpNorm<Eigen::Infinity>();
        if (g_norm <= kResidualTol && el_norm <= kResidualTol) {
            out.u0 = u0;
            out.multiplier = z[n];
            out.residual_norm = el_norm;
            out.species = reconstruct_species(u0, params, mesh.domain_measure);
            double d = 1.0;
            for (const auto& field : out.species.values)
                for (double v : field) d = std::min(d, std::min(v, 1.0 - v));
            out.delta = d;
            return out;
        }

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(4 * mesh.interior_edges.size() + 3 * static_cast<std::size_t>(n) + 1);
        for (int c = 0; c < n; ++c) {
            trip.emplace_back(c, c,
                              eps * mesh.tau_sum_int[c] / mesh.cell_measure[c] -
                                  nonlinearity_prime(u0[c], params.beta));
            trip.emplace_back(c, n, 1.0);
            trip.emplace_back(n, c, mesh.cell_measure[c]);
        }
        for (const auto& ie : mesh.interior_edges) {
            trip.emplace_back(ie.k, ie.l, -eps * ie.tau / mesh.cell_measure[ie.k]);
            trip.emplace_back(ie.l, ie.k, -eps * ie.tau / mesh.cell_measure[ie.l]);
        }
        Eigen::SparseMatrix<double> j(n + 1, n + 1);
        j.setFromTriplets(trip.begin(), trip.end());
        if (!analyzed) {
            lu.analyzePattern(j);
            analyzed = true;
        }
        lu.factorize(j);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("solve_stationary: singular linearization");
        const Eigen::VectorXd delta = lu.solve(-g);

        // largest step factor in (0,1] keeping the iterate inside the box
        double alpha = 1.0;
        for (int c = 0; c < n; ++c) {
            const double target = z[c] + delta[c];
            if (target <= kGamma && delta[c] < 0.0)
                alpha = std::min(alpha, (kGamma - z[c]) / delta[c]);
            if (target >= 1.0 - kGamma && delta[c] > 0.0)
                alpha = std::min(alpha, (1.0 - kGamma - z[c]) / delta[c]);
        }
        z += alpha * delta;
        for (int c = 0; c < n; ++c)
            z[c] = std::min(std::max(z[c], kGamma), 1.0 - kGamma);
    }
    throw std::runtime_error("solve_stationary: no convergence within 100 iterations");
}

State reconstruct_species(const CellField& u0, const ModelParams& params,
                          double domain_measure) {
    require_interior(u0);
    if (params.masses.empty())
        throw std::invalid_argument("reconstruct_species: params carry no masses");
    const int ns = params.n_species;
    const double scale = domain_measure - params.masses[0];
    State s;
    s.values.assign(ns, CellField(u0.size()));
    s.values[0] = u0;
    for (int i = 1; i + 1 < ns; ++i) {
        const double ci = params.masses[i] / scale;
        for (std::size_t c = 0; c < u0.size(); ++c) s.values[i][c] = ci * (1.0 - u0[c]);
    }
    // final species by complement keeps the per-cell sums exactly 1
    for (std::size_t c = 0; c < u0.size(); ++c) {
        double acc = 0.0;
        for (int i = 0; i + 1 < ns; ++i) acc += s.values[i][c];
        s.values[ns - 1][c] = 1.0 - acc;
    }
    return s;
}

} // namespace cdch
