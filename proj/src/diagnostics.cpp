#include "cdch/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cdch/scheme.hpp"
#include "cdch/stationary.hpp"

namespace cdch {

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double dissipation(const Mesh& mesh, const ModelParams& params, const State& u_next,
                   const State& u_prev) {
    if (u_next.min_value() <= 0.0) return kNaN;
    const int ns = params.n_species;
    const EdgeFractions ef = edge_fractions(mesh, u_next);
    const std::vector<CellField> mu = chemical_potentials(mesh, params, u_next, u_prev);
    double total = 0.0;
    for (int e = 0; e < mesh.n_interior_edges(); ++e) {
        const auto& ie = mesh.interior_edges[e];
        double quad = 0.0;
        for (int i = 0; i < ns; ++i)
            for (int j = i + 1; j < ns; ++j) {
                const double dmu =
                    (mu[i][ie.l] - mu[i][ie.k]) - (mu[j][ie.l] - mu[j][ie.k]);
                quad += params.coeffs(i, j) * ef.values[i][e] * ef.values[j][e] * dmu * dmu;
            }
        total += ie.tau * quad;
    }
    return total;
}

RateFit fit_exponential_rate(const std::vector<double>& times,
                             const std::vector<double>& values) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_exponential_rate: size mismatch");
    if (times.size() < 3) throw std::invalid_argument("fit_exponential_rate: need >= 3 points");
    const int n = static_cast<int>(times.size());
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(values[i] > 0.0))
            throw std::invalid_argument("fit_exponential_rate: values must be positive");
        sx += times[i];
        sy += std::log(values[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = times[i] - mx;
        const double dy = std::log(values[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_exponential_rate: degenerate times");
    RateFit fit;
    const double slope = sxy / sxx;
    fit.rate = -slope;
    fit.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

StepDiagnostics check_step(const Mesh& mesh, const ModelParams& params, const State& prev,
                           const State& next, double dt, long step, int newton_iters,
                           const State* reference) {
    StepDiagnostics d;
    d.step = step;
    d.time = next.time;
    d.dt = dt;
    d.energy = discrete_energy(mesh, params, next);
    d.dissipation = (dt > 0.0) ? dissipation(mesh, params, next, prev) : 0.0;
    d.masses = masses_of(mesh, next);
    d.min_u = next.min_value();
    d.max_u = next.max_value();
    d.vf_defect = next.volume_filling_defect();
    d.newton_iters = newton_iters;

    d.el_residual = kNaN;
    const CellField& u0 = next.values[0];
    bool interior = true;
    for (double v : u0)
        if (!(v > 0.0) || !(v < 1.0)) {
            interior = false;
            break;
        }
    if (interior) {
        const CellField r = el_residual_field(mesh, params, u0, d.masses[0]);
        double norm = 0.0;
        for (double v : r) norm = std::max(norm, std::abs(v));
        d.el_residual = norm;
    }

    d.relative_energy =
        reference ? d.energy.e_total - discrete_energy(mesh, params, *reference).e_total : kNaN;

    if (dt > 0.0) {
        const double e_prev = discrete_energy(mesh, params, prev).e_total;
        d.energy_slack = d.energy.e_total - e_prev +
                         (std::isnan(d.dissipation) ? 0.0 : dt * d.dissipation);
    } else {
        d.energy_slack = 0.0;
    }
    return d;
}

std::vector<Violation> scan_invariants(const std::vector<StepDiagnostics>& series,
                                       double mass_tol, double vf_tol,
                                       double tol_slack_coef) {
    std::vector<Violation> out;
    if (series.empty()) return out;
    const auto& m0 = series.front().masses;
    for (std::size_t p = 0; p < series.size(); ++p) {
        const auto& d = series[p];
        for (std::size_t i = 0; i < d.masses.size(); ++i) {
            const double drift = std::abs(d.masses[i] - m0[i]);
            if (drift > mass_tol)
                out.push_back({d.step, "mass drift, species " + std::to_string(i), drift});
        }
        if (!(d.min_u > 0.0)) out.push_back({d.step, "positivity lost", d.min_u});
        if (d.vf_defect > vf_tol)
            out.push_back({d.step, "volume-filling defect", d.vf_defect});
        if (p == 0) continue;
        if (std::isnan(d.dissipation) || d.dissipation < 0.0)
            out.push_back({d.step, "dissipation undefined or negative", d.dissipation});
        const double e_prev = series[p - 1].energy.e_total;
        const double slack = tol_slack_coef * (1.0 + std::abs(e_prev));
        if (!(d.energy_slack <= slack))
            out.push_back({d.step, "energy inequality violated", d.energy_slack});
    }
    return out;
}

} // namespace cdch
