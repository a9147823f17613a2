#include "cdch/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cdch {

namespace {
constexpr double kNearEqual = 1e-8; // relative switch to the series branch

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }
} // namespace

double ModelParams::min_offdiag() const {
    double k = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_species; ++i)
        for (int j = 0; j < n_species; ++j)
            if (i != j) k = std::min(k, coeffs(i, j));
    return k;
}

void ModelParams::validate(double domain_measure) const {
    if (n_species < 2) throw std::invalid_argument("params: need at least two species");
    if (!(epsilon > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("params: epsilon and beta must be positive");
    if (coeffs.rows() != n_species || coeffs.cols() != n_species)
        throw std::invalid_argument("params: coefficient matrix has wrong size");
    for (int i = 0; i < n_species; ++i)
        for (int j = 0; j < n_species; ++j) {
            if (i == j) continue;
            if (!(coeffs(i, j) > 0.0))
                throw std::invalid_argument("params: off-diagonal K_ij must be positive");
            if (coeffs(i, j) != coeffs(j, i))
                throw std::invalid_argument("params: K_ij must be symmetric");
        }
    if (!masses.empty()) {
        if (static_cast<int>(masses.size()) != n_species)
            throw std::invalid_argument("params: wrong number of masses");
        double sum = 0.0;
        for (double m : masses) {
            if (!(m > 0.0)) throw std::invalid_argument("params: masses must be positive");
            sum += m;
        }
        if (domain_measure > 0.0 && std::abs(sum - domain_measure) > 1e-12 * domain_measure)
            throw std::invalid_argument("params: masses must sum to the domain measure");
    }
}

double log_mean(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("log_mean: NaN input");
    if (std::min(a, b) <= 0.0) return 0.0;
    if (a == b) return a;
    // evaluate at sorted arguments so both orders give the same bits
    const double hi = std::max(a, b), lo = std::min(a, b);
    const double d = hi - lo;
    if (d <= kNearEqual * hi) {
        // (hi-lo)/(ln hi - ln lo) loses all digits as hi -> lo; use the
        // expansion m (1 - xi^2/3 - 4 xi^4/45) with xi = (hi-lo)/(hi+lo).
        const double xi = d / (hi + lo);
        const double xi2 = xi * xi;
        return 0.5 * (hi + lo) * (1.0 - xi2 / 3.0 - 4.0 * xi2 * xi2 / 45.0);
    }
    return d / std::log1p(d / lo);
}

LogMeanPartials log_mean_partials(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("log_mean_partials: NaN input");
    if (std::min(a, b) <= 0.0) return {0.0, 0.0}; // the mean is identically 0 there
    if (a == b) return {0.5, 0.5};
    const double hi = std::max(a, b), lo = std::min(a, b);
    const double d = hi - lo;
    double dhi, dlo;
    if (d <= kNearEqual * hi) {
        // Lambda = m g(xi), g = 1 - xi^2/3 - 4 xi^4/45;
        // d/dhi = g/2 + lo/(hi+lo) g'(xi), d/dlo = g/2 - hi/(hi+lo) g'(xi).
        const double s = hi + lo;
        const double xi = d / s;
        const double g = 1.0 - xi * xi / 3.0 - 4.0 * std::pow(xi, 4) / 45.0;
        const double gp = -2.0 * xi / 3.0 - 16.0 * xi * xi * xi / 45.0;
        dhi = 0.5 * g + (lo / s) * gp;
        dlo = 0.5 * g - (hi / s) * gp;
    } else {
        const double lg = std::log1p(d / lo); // ln hi - ln lo, full precision
        dhi = (lg - d / hi) / (lg * lg);
        dlo = (-lg + d / lo) / (lg * lg);
    }
    return (a >= b) ? LogMeanPartials{dhi, dlo} : LogMeanPartials{dlo, dhi};
}

Eigen::MatrixXd mobility(const ModelParams& params, const std::vector<double>& u) {
    const int n = params.n_species;
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("mobility: wrong number of species values");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    // one product per unordered pair keeps the matrix exactly symmetric
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double kij = params.coeffs(i, j) * u[i] * u[j];
            m(i, j) = -kij;
            m(j, i) = -kij;
            m(i, i) += kij;
            m(j, j) += kij;
        }
    return m;
}

namespace {
// x ln x - x + 1, continuously extended by 0 at x = 0.
double boltzmann(double x) {
    if (x == 0.0) return 1.0; // limit of -x + 1
    return x * std::log(x) - x + 1.0;
}
} // namespace

EnergyBreakdown discrete_energy(const Mesh& mesh, const ModelParams& params, const State& u) {
    if (u.n_cells() != mesh.n_cells() || u.n_species() != params.n_species)
        throw std::invalid_argument("discrete_energy: state does not match mesh/params");
    double boltz = 0.0;
    for (int i = 0; i < u.n_species(); ++i)
        for (int c = 0; c < mesh.n_cells(); ++c) {
            const double v = u.at(i, c);
            if (v < 0.0) throw std::domain_error("discrete_energy: negative volume fraction");
            boltz += mesh.cell_measure[c] * boltzmann(v);
        }
    double grad = 0.0;
    for (const auto& ie : mesh.interior_edges) {
        const double dj = u.values[0][ie.l] - u.values[0][ie.k];
        grad += ie.tau * dj * dj;
    }
    double conc = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const double v0 = u.at(0, c);
        conc += mesh.cell_measure[c] * v0 * (1.0 - v0);
    }
    EnergyBreakdown e;
    e.e_conv = boltz + 0.5 * params.epsilon * grad;
    e.e_conc = params.beta * conc;
    e.e_total = e.e_conv + e.e_conc;
    return e;
}

double relative_energy(const Mesh& mesh, const ModelParams& params, const State& u,
                       const State& u_ref) {
    return discrete_energy(mesh, params, u).e_total - discrete_energy(mesh, params, u_ref).e_total;
}

CellField w0_half(const Mesh& mesh, const ModelParams& params, const CellField& u0_next,
                  const CellField& u0_prev) {
    if (static_cast<int>(u0_next.size()) != mesh.n_cells() ||
        static_cast<int>(u0_prev.size()) != mesh.n_cells())
        throw std::invalid_argument("w0_half: field does not match mesh");
    CellField lap(mesh.n_cells(), 0.0); // sum_sigma tau_sigma D_{K sigma} u0_next per cell
    for (const auto& ie : mesh.interior_edges) {
        const double flux = ie.tau * (u0_next[ie.l] - u0_next[ie.k]);
        lap[ie.k] += flux;
        lap[ie.l] -= flux;
    }
    CellField w(mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c)
        w[c] = -(params.epsilon / mesh.cell_measure[c]) * lap[c] +
               params.beta * (1.0 - 2.0 * u0_prev[c]);
    return w;
}

std::vector<CellField> chemical_potentials(const Mesh& mesh, const ModelParams& params,
                                           const State& u_next, const State& u_prev) {
    if (u_next.min_value() <= 0.0)
        throw std::domain_error("chemical_potentials: state must be strictly positive");
    std::vector<CellField> mu(u_next.n_species(), CellField(mesh.n_cells()));
    const CellField w0 = w0_half(mesh, params, u_next.values[0], u_prev.values[0]);
    for (int c = 0; c < mesh.n_cells(); ++c)
        mu[0][c] = std::log(u_next.at(0, c)) + w0[c];
    for (int i = 1; i < u_next.n_species(); ++i)
        for (int c = 0; c < mesh.n_cells(); ++c)
            mu[i][c] = std::log(u_next.at(i, c));
    return mu;
}

State constant_steady_state(const Mesh& mesh, const ModelParams& params) {
    params.validate(mesh.domain_measure);
    if (params.masses.empty())
        throw std::invalid_argument("constant_steady_state: params carry no masses");
    State s;
    s.values.resize(params.n_species);
    for (int i = 0; i < params.n_species; ++i)
        s.values[i].assign(mesh.n_cells(), params.masses[i] / mesh.domain_measure);
    return s;
}

StabilityReport stability_report(const ModelParams& params, double domain_measure, double c_p,
                                 double c_sob) {
    if (!(c_p > 0.0) || !(c_sob > 0.0))
        throw std::invalid_argument("stability_report: constants must be positive");
    if (params.masses.empty())
        throw std::invalid_argument("stability_report: params carry no masses");
    StabilityReport r;
    r.c_p = c_p;
    r.c_sob = c_sob;
    const double m0 = params.masses[0];
    const double gap = 0.5 * params.epsilon / c_p - params.beta;
    r.convexity_margin = 0.5 / m0 + gap / domain_measure;
    const double m_rest = domain_measure - m0;
    r.convexity_margin_binary =
        0.5 * domain_measure / (m0 * m_rest) + gap / domain_measure;
    r.globally_stable = gap > 0.0;
    r.lambda = r.globally_stable
                   ? 4.0 * params.min_offdiag() *
                         std::min(1.0 / c_sob, 1.0 / c_p - 2.0 * params.beta / params.epsilon)
                   : quiet_nan();
    return r;
}

std::string StabilityReport::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "convexity_margin = " << convexity_margin << "\n"
       << "convexity_margin_binary = " << convexity_margin_binary << "\n"
       << "globally_stable = " << (globally_stable ? "true" : "false") << "\n"
       << "lambda = " << lambda << "\n"
       << "c_p = " << c_p << "\n"
       << "c_sob = " << c_sob << "\n";
    return os.str();
}

double State::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& f : values)
        for (double v : f) m = std::min(m, v);
    return m;
}

double State::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& f : values)
        for (double v : f) m = std::max(m, v);
    return m;
}

double State::volume_filling_defect() const {
    double worst = 0.0;
    for (int c = 0; c < n_cells(); ++c) {
        double s = 0.0;
        for (int i = 0; i < n_species(); ++i) s += values[i][c];
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

std::vector<double> masses_of(const Mesh& mesh, const State& u) {
    std::vector<double> m(u.n_species(), 0.0);
    for (int i = 0; i < u.n_species(); ++i)
        for (int c = 0; c < mesh.n_cells(); ++c) m[i] += mesh.cell_measure[c] * u.values[i][c];
    return m;
}

} // namespace cdch
