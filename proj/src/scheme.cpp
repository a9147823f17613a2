#include "cdch/scheme.hpp"

#include <cmath>
#include <stdexcept>

namespace cdch {

void SolverConfig::validate() const {
    if (!(newton_tol > 0.0)) throw std::invalid_argument("solver: newton_tol must be positive");
    if (newton_max_iter < 1) throw std::invalid_argument("solver: newton_max_iter must be >= 1");
    if (!(dt_min > 0.0) || !(dt_min <= dt_max))
        throw std::invalid_argument("solver: need 0 < dt_min <= dt_max");
    if (!(dt_shrink < 1.0) || !(dt_grow > 1.0))
        throw std::invalid_argument("solver: need dt_shrink < 1 < dt_grow");
}

double FluxSet::species_sum(int e) const {
    double s = 0.0;
    for (const auto& f : flux) s += f[e];
    return s;
}

State project_initial(const std::vector<ProfileFn>& profiles, const Mesh& mesh) {
    if (profiles.empty()) throw std::invalid_argument("project_initial: no profiles");
    State s;
    s.values.assign(profiles.size(), CellField(mesh.n_cells()));
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (int c = 0; c < mesh.n_cells(); ++c) {
            const double v = profiles[i](mesh.cell_center[c]);
            if (!(v >= 0.0) || !(v <= 1.0))
                throw std::domain_error("project_initial: profile value outside [0,1]");
            s.values[i][c] = v;
        }
    return s;
}

EdgeFractions edge_fractions(const Mesh& mesh, const State& u) {
    EdgeFractions ef;
    ef.values.assign(u.n_species(), std::vector<double>(mesh.n_interior_edges()));
    for (int i = 0; i < u.n_species(); ++i) {
        const CellField& f = u.values[i];
        for (int e = 0; e < mesh.n_interior_edges(); ++e) {
            const auto& ie = mesh.interior_edges[e];
            ef.values[i][e] = log_mean(f[ie.k], f[ie.l]);
        }
    }
    return ef;
}

FluxSet fluxes(const Mesh& mesh, const ModelParams& params, const State& u_next,
               const State& u_prev) {
    const int ns = params.n_species;
    const EdgeFractions ef = edge_fractions(mesh, u_next);
    const CellField w0 = w0_half(mesh, params, u_next.values[0], u_prev.values[0]);

    FluxSet out;
    out.flux.assign(ns, std::vector<double>(mesh.n_interior_edges(), 0.0));
    std::vector<double> s(ns), d(ns);
    for (int e = 0; e < mesh.n_interior_edges(); ++e) {
        const auto& ie = mesh.interior_edges[e];
        for (int i = 0; i < ns; ++i) {
            s[i] = ef.values[i][e];
            d[i] = u_next.values[i][ie.l] - u_next.values[i][ie.k];
        }
        const double dw = w0[ie.l] - w0[ie.k];
        for (int i = 0; i < ns; ++i) {
            double cross = 0.0;
            for (int j = 0; j < ns; ++j) {
                if (j == i) continue;
                cross += params.coeffs(i, j) * (s[j] * d[i] - s[i] * d[j]);
            }
            double ch; // Cahn-Hilliard coupling; species 0 compensates the others
            if (i == 0) {
                ch = 0.0;
                for (int j = 1; j < ns; ++j) ch -= params.coeffs(j, 0) * s[j] * s[0];
            } else {
                ch = params.coeffs(i, 0) * s[i] * s[0];
            }
            out.flux[i][e] = -ie.tau * cross + ie.tau * ch * dw;
        }
    }
    return out;
}

FluxSet fluxes_entropic(const Mesh& mesh, const ModelParams& params, const State& u_next,
                        const State& u_prev) {
    const int ns = params.n_species;
    const EdgeFractions ef = edge_fractions(mesh, u_next);
    const std::vector<CellField> mu = chemical_potentials(mesh, params, u_next, u_prev);

    FluxSet out;
    out.flux.assign(ns, std::vector<double>(mesh.n_interior_edges(), 0.0));
    for (int e = 0; e < mesh.n_interior_edges(); ++e) {
        const auto& ie = mesh.interior_edges[e];
        for (int i = 0; i < ns; ++i) {
            double acc = 0.0;
            for (int j = 0; j < ns; ++j) {
                if (j == i) continue;
                const double dmu = (mu[i][ie.l] - mu[i][ie.k]) - (mu[j][ie.l] - mu[j][ie.k]);
                acc += params.coeffs(i, j) * ef.values[i][e] * ef.values[j][e] * dmu;
            }
            out.flux[i][e] = -ie.tau * acc;
        }
    }
    return out;
}

Eigen::VectorXd residual(const Mesh& mesh, const ModelParams& params, const State& u_next,
                         const State& u_prev, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("residual: dt must be positive");
    const int ns = params.n_species;
    const FluxSet fl = fluxes(mesh, params, u_next, u_prev);
    Eigen::VectorXd r(ns * mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c)
        for (int i = 0; i < ns; ++i)
            r[unknown_index(ns, c, i)] =
                mesh.cell_measure[c] * (u_next.values[i][c] - u_prev.values[i][c]) / dt;
    for (int e = 0; e < mesh.n_interior_edges(); ++e) {
        const auto& ie = mesh.interior_edges[e];
        for (int i = 0; i < ns; ++i) {
            r[unknown_index(ns, ie.k, i)] += fl.flux[i][e];
            r[unknown_index(ns, ie.l, i)] -= fl.flux[i][e];
        }
    }
    return r;
}

Eigen::SparseMatrix<double> jacobian(const Mesh& mesh, const ModelParams& params,
                                     const State& u_next, const State& u_prev, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("jacobian: dt must be positive");
    const int ns = params.n_species;
    const int n_unknowns = ns * mesh.n_cells();
    const double eps = params.epsilon;

    std::vector<Eigen::Triplet<double>> trip;
    // rough upper bound: time diagonal + per-edge dense block + W0 stencil
    std::size_t per_edge = static_cast<std::size_t>(2 * ns) * (2 * ns + 12);
    trip.reserve(n_unknowns + per_edge * mesh.interior_edges.size());

    for (int c = 0; c < mesh.n_cells(); ++c)
        for (int i = 0; i < ns; ++i) {
            const int idx = unknown_index(ns, c, i);
            trip.emplace_back(idx, idx, mesh.cell_measure[c] / dt);
        }

    const CellField w0 = w0_half(mesh, params, u_next.values[0], u_prev.values[0]);
    std::vector<double> s(ns), d(ns), ska(ns), skb(ns), c_ch(ns);
    std::vector<std::pair<int, double>> dw_partials; // d(W0_l - W0_k)/dU0_cell

    for (int e = 0; e < mesh.n_interior_edges(); ++e) {
        const auto& ie = mesh.interior_edges[e];
        const int k = ie.k, l = ie.l;
        const double tau = ie.tau;

        for (int i = 0; i < ns; ++i) {
            const double a = u_next.values[i][k], b = u_next.values[i][l];
            s[i] = log_mean(a, b);
            const LogMeanPartials p = log_mean_partials(a, b);
            ska[i] = p.da;
            skb[i] = p.db;
            d[i] = b - a;
        }
        const double dw = w0[l] - w0[k];

        dw_partials.clear();
        // dW0_c/dU0_c = +(eps/m_c) sum tau, dW0_c/dU0_nbr = -(eps/m_c) tau
        dw_partials.emplace_back(l, (eps / mesh.cell_measure[l]) * mesh.tau_sum_int[l]);
        dw_partials.emplace_back(k, -(eps / mesh.cell_measure[k]) * mesh.tau_sum_int[k]);
        for (EdgeIndex g : mesh.cell_edges[l])
            if (mesh.is_interior(g)) {
                const auto& ge = mesh.interior_edges[g];
                const int nbr = (ge.k == l) ? ge.l : ge.k;
                dw_partials.emplace_back(nbr, -(eps / mesh.cell_measure[l]) * ge.tau);
            }
        for (EdgeIndex g : mesh.cell_edges[k])
            if (mesh.is_interior(g)) {
                const auto& ge = mesh.interior_edges[g];
                const int nbr = (ge.k == k) ? ge.l : ge.k;
                dw_partials.emplace_back(nbr, (eps / mesh.cell_measure[k]) * ge.tau);
            }

        // Cahn-Hilliard coefficients c_i with J_i = -tau cross_i + tau c_i dw
        for (int i = 1; i < ns; ++i) c_ch[i] = params.coeffs(i, 0) * s[i] * s[0];
        c_ch[0] = 0.0;
        for (int j = 1; j < ns; ++j) c_ch[0] -= params.coeffs(j, 0) * s[j] * s[0];

        for (int i = 0; i < ns; ++i) {
            const int row_k = unknown_index(ns, k, i);
            const int row_l = unknown_index(ns, l, i);
            // zero-valued entries are kept so the sparsity pattern stays fixed
            auto add = [&](int col, double v) {
                trip.emplace_back(row_k, col, v);
                trip.emplace_back(row_l, col, -v);
            };

            // cross-diffusion part, same species columns
            double cross_a = 0.0, cross_b = 0.0;
            for (int j = 0; j < ns; ++j) {
                if (j == i) continue;
                cross_a += params.coeffs(i, j) * (-s[j] - ska[i] * d[j]);
                cross_b += params.coeffs(i, j) * (s[j] - skb[i] * d[j]);
            }
            // Cahn-Hilliard part, same species columns
            double ch_a = 0.0, ch_b = 0.0;
            if (i == 0) {
                for (int j = 1; j < ns; ++j) {
                    ch_a += -params.coeffs(j, 0) * s[j] * ska[0];
                    ch_b += -params.coeffs(j, 0) * s[j] * skb[0];
                }
            } else {
                ch_a = params.coeffs(i, 0) * ska[i] * s[0];
                ch_b = params.coeffs(i, 0) * skb[i] * s[0];
                // dependence on species 0 through s[0]
                const double g_a = params.coeffs(i, 0) * s[i] * ska[0];
                const double g_b = params.coeffs(i, 0) * s[i] * skb[0];
                add(unknown_index(ns, k, 0), tau * g_a * dw);
                add(unknown_index(ns, l, 0), tau * g_b * dw);
            }
            add(unknown_index(ns, k, i), -tau * cross_a + tau * ch_a * dw);
            add(unknown_index(ns, l, i), -tau * cross_b + tau * ch_b * dw);

            // cross-species columns q != i
            for (int q = 0; q < ns; ++q) {
                if (q == i) continue;
                const double cq_a = params.coeffs(i, q) * (ska[q] * d[i] + s[i]);
                const double cq_b = params.coeffs(i, q) * (skb[q] * d[i] - s[i]);
                double chq_a = 0.0, chq_b = 0.0;
                if (i == 0 && q >= 1) {
                    chq_a = -params.coeffs(q, 0) * ska[q] * s[0];
                    chq_b = -params.coeffs(q, 0) * skb[q] * s[0];
                }
                add(unknown_index(ns, k, q), -tau * cq_a + tau * chq_a * dw);
                add(unknown_index(ns, l, q), -tau * cq_b + tau * chq_b * dw);
            }

            // W0 coupling through the discrete Laplacian stencil
            for (const auto& [cell, dv] : dw_partials)
                add(unknown_index(ns, cell, 0), tau * c_ch[i] * dv);
        }
    }

    Eigen::SparseMatrix<double> m(n_unknowns, n_unknowns);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

NewtonResult newton_solve(const Mesh& mesh, const ModelParams& params, const State& u_prev,
                          double dt, const SolverConfig& config, NewtonWorkspace* workspace) {
    config.validate();
    NewtonWorkspace local;
    NewtonWorkspace& ws = workspace ? *workspace : local;

    NewtonResult res;
    State u = u_prev;
    for (int it = 1; it <= config.newton_max_iter; ++it) {
        res.iterations = it;
        const Eigen::VectorXd f = residual(mesh, params, u, u_prev, dt);
        res.residual_norm = f.lpNorm<Eigen::Infinity>();
        const Eigen::SparseMatrix<double> j = jacobian(mesh, params, u, u_prev, dt);
        if (!ws.pattern_ready) {
            ws.solver.analyzePattern(j);
            ws.pattern_ready = true;
        }
        ws.solver.factorize(j);
        if (ws.solver.info() != Eigen::Success) {
            res.failure = "singular Newton linearization";
            return res;
        }
        const Eigen::VectorXd delta = ws.solver.solve(-f);
        if (ws.solver.info() != Eigen::Success) {
            res.failure = "linear solve failed";
            return res;
        }
        const int ns = params.n_species;
        for (int c = 0; c < mesh.n_cells(); ++c)
            for (int i = 0; i < ns; ++i) u.values[i][c] += delta[unknown_index(ns, c, i)];
        res.update_norm = delta.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(res.update_norm) || u.min_value() < config.guard_lo ||
            u.max_value() > config.guard_hi) {
            res.failure = "iterate left the guard box";
            return res;
        }
        if (res.update_norm <= config.newton_tol) {
            res.residual_norm =
                residual(mesh, params, u, u_prev, dt).lpNorm<Eigen::Infinity>();
            res.state = std::move(u);
            return res;
        }
    }
    res.failure = "no convergence within newton_max_iter iterations";
    return res;
}

} // namespace cdch
