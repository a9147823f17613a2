#include "cdch/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cdch {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

} // namespace

void write_series_csv(const std::string& path, const std::vector<StepDiagnostics>& series) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    const int ns = series.empty() ? 0 : static_cast<int>(series.front().masses.size());
    std::fprintf(f, "step,time,dt,E_total,E_conv,E_conc,dissipation,RE");
    for (int i = 0; i < ns; ++i) std::fprintf(f, ",mass_%d", i);
    std::fprintf(f, ",min_u,max_u,el_residual,newton_iters\n");
    for (const auto& d : series) {
        std::fprintf(f, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", d.step, d.time, d.dt,
                     d.energy.e_total, d.energy.e_conv, d.energy.e_conc, d.dissipation,
                     d.relative_energy);
        for (double m : d.masses) std::fprintf(f, ",%.17g", m);
        std::fprintf(f, ",%.17g,%.17g,%.17g,%d\n", d.min_u, d.max_u, d.el_residual,
                     d.newton_iters);
    }
    std::fclose(f);
}

std::vector<StepDiagnostics> read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty series file " + path);
    const auto header = split_line(line);
    int n_masses = 0;
    for (const auto& h : header)
        if (h.rfind("mass_", 0) == 0) ++n_masses;
    const std::size_t expected = 8 + n_masses + 4;
    if (header.size() != expected || n_masses == 0)
        throw std::runtime_error("unrecognized series header in " + path);

    std::vector<StepDiagnostics> out;
    double prev_e = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split_line(line);
        if (cols.size() != expected)
            throw std::runtime_error("malformed series row in " + path);
        StepDiagnostics d;
        int c = 0;
        d.step = std::stol(cols[c++]);
        d.time = std::stod(cols[c++]);
        d.dt = std::stod(cols[c++]);
        d.energy.e_total = std::stod(cols[c++]);
        d.energy.e_conv = std::stod(cols[c++]);
        d.energy.e_conc = std::stod(cols[c++]);
        d.dissipation = std::stod(cols[c++]);
        d.relative_energy = std::stod(cols[c++]);
        d.masses.resize(n_masses);
        for (int i = 0; i < n_masses; ++i) d.masses[i] = std::stod(cols[c++]);
        d.min_u = std::stod(cols[c++]);
        d.max_u = std::stod(cols[c++]);
        d.el_residual = std::stod(cols[c++]);
        d.newton_iters = std::stoi(cols[c++]);
        d.energy_slack = out.empty()
                             ? 0.0
                             : d.energy.e_total - prev_e +
                                   (std::isnan(d.dissipation) ? 0.0 : d.dt * d.dissipation);
        prev_e = d.energy.e_total;
        out.push_back(std::move(d));
    }
    return out;
}

void write_snapshot_csv(const std::string& path, const Mesh& mesh, const State& state) {
    if (state.n_cells() != mesh.n_cells())
        throw std::invalid_argument("snapshot: state does not match mesh");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "cell_id,x");
    if (mesh.dim == 2) std::fprintf(f, ",y");
    for (int i = 0; i < state.n_species(); ++i) std::fprintf(f, ",u_%d", i);
    std::fprintf(f, "\n");
    for (int c = 0; c < mesh.n_cells(); ++c) {
        std::fprintf(f, "%d,%.17g", c, mesh.cell_center[c][0]);
        if (mesh.dim == 2) std::fprintf(f, ",%.17g", mesh.cell_center[c][1]);
        for (int i = 0; i < state.n_species(); ++i)
            std::fprintf(f, ",%.17g", state.values[i][c]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

State read_snapshot_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty snapshot file " + path);
    const auto header = split_line(line);
    int n_species = 0, first_u = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i].rfind("u_", 0) == 0) {
            if (first_u < 0) first_u = static_cast<int>(i);
            ++n_species;
        }
    if (n_species == 0) throw std::runtime_error("snapshot has no species columns: " + path);

    State s;
    s.values.assign(n_species, {});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split_line(line);
        if (cols.size() != header.size())
            throw std::runtime_error("malformed snapshot row in " + path);
        for (int i = 0; i < n_species; ++i)
            s.values[i].push_back(std::stod(cols[first_u + i]));
    }
    return s;
}

std::vector<Violation> verify_series(const std::vector<StepDiagnostics>& series,
                                     double mass_tol, double tol_slack_coef) {
    std::vector<Violation> out;
    if (series.empty()) {
        out.push_back({0, "empty series", 0.0});
        return out;
    }
    const auto& m0 = series.front().masses;
    for (std::size_t p = 0; p < series.size(); ++p) {
        const auto& d = series[p];
        for (std::size_t i = 0; i < d.masses.size(); ++i) {
            const double drift = std::abs(d.masses[i] - m0[i]);
            if (drift > mass_tol)
                out.push_back({d.step, "mass drift, species " + std::to_string(i), drift});
        }
        if (!(d.min_u > 0.0)) out.push_back({d.step, "positivity lost", d.min_u});
        if (p == 0) continue;
        if (std::isnan(d.dissipation) || d.dissipation < 0.0)
            out.push_back({d.step, "dissipation undefined or negative", d.dissipation});
        const double slack = tol_slack_coef * (1.0 + std::abs(series[p - 1].energy.e_total));
        if (!(d.energy_slack <= slack))
            out.push_back({d.step, "energy inequality violated", d.energy_slack});
    }
    return out;
}

} // namespace cdch
