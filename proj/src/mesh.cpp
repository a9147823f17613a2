#include "cdch/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cdch {

void Mesh::finalize() {
    cell_edges.assign(cell_measure.size(), {});
    tau_sum_int.assign(cell_measure.size(), 0.0);
    for (int e = 0; e < n_interior_edges(); ++e) {
        const auto& ie = interior_edges[e];
        cell_edges[ie.k].push_back(e);
        cell_edges[ie.l].push_back(e);
        tau_sum_int[ie.k] += ie.tau;
        tau_sum_int[ie.l] += ie.tau;
    }
    const int base = n_interior_edges();
    for (int b = 0; b < static_cast<int>(boundary_edges.size()); ++b)
        cell_edges[boundary_edges[b].k].push_back(base + b);
}

void Mesh::validate(double tol) const {
    if (cell_measure.size() != cell_center.size() || cell_edges.size() != cell_measure.size())
        throw std::invalid_argument("mesh: inconsistent array sizes");
    double total = 0.0;
    for (double m : cell_measure) {
        if (!(m > 0.0)) throw std::invalid_argument("mesh: non-positive cell measure");
        total += m;
    }
    if (domain_measure > 0.0 && std::abs(total - domain_measure) > tol * domain_measure)
        throw std::invalid_argument("mesh: cell measures do not sum to the domain measure");
    for (const auto& ie : interior_edges) {
        if (ie.k < 0 || ie.l < 0 || ie.k >= n_cells() || ie.l >= n_cells() || ie.k == ie.l)
            throw std::invalid_argument("mesh: bad interior edge cells");
        if (!(ie.tau > 0.0) || !(ie.m_sigma > 0.0) || !(ie.d_sigma > 0.0))
            throw std::invalid_argument("mesh: non-positive edge geometry");
        const double dx = cell_center[ie.l][0] - cell_center[ie.k][0];
        const double dy = cell_center[ie.l][1] - cell_center[ie.k][1];
        const double dist = std::hypot(dx, dy);
        if (std::abs(dist - ie.d_sigma) > tol * std::max(1.0, ie.d_sigma))
            throw std::invalid_argument("mesh: d_sigma inconsistent with cell centers");
        const double nn = std::hypot(ie.normal[0], ie.normal[1]);
        if (nn > 0.0) {
            // orthogonality to the face <=> x_L - x_K parallel to the normal
            const double cross = dx * ie.normal[1] - dy * ie.normal[0];
            if (std::abs(cross) > tol * dist)
                throw std::invalid_argument("mesh: center-to-center vector not orthogonal to face");
        }
    }
    for (const auto& be : boundary_edges) {
        if (be.k < 0 || be.k >= n_cells())
            throw std::invalid_argument("mesh: bad boundary edge cell");
        if (!(be.tau > 0.0) || !(be.m_sigma > 0.0) || !(be.d_sigma > 0.0))
            throw std::invalid_argument("mesh: non-positive boundary edge geometry");
    }
    // every interior edge must appear in the adjacency of exactly its two cells
    std::vector<int> seen(n_interior_edges(), 0);
    for (int c = 0; c < n_cells(); ++c)
        for (EdgeIndex e : cell_edges[c])
            if (is_interior(e)) {
                if (interior_edges[e].k != c && interior_edges[e].l != c)
                    throw std::invalid_argument("mesh: adjacency lists a non-incident edge");
                ++seen[e];
            }
    for (int s : seen)
        if (s != 2) throw std::invalid_argument("mesh: interior edge not listed by exactly two cells");
}

Mesh build_interval_mesh(int n_cells, double length) {
    if (n_cells < 1) throw std::invalid_argument("build_interval_mesh: n_cells must be >= 1");
    if (!(length > 0.0)) throw std::invalid_argument("build_interval_mesh: length must be positive");
    Mesh m;
    m.dim = 1;
    m.domain_measure = length;
    const double h = length / n_cells;
    m.cell_measure.assign(n_cells, h);
    m.cell_center.resize(n_cells);
    for (int i = 0; i < n_cells; ++i) m.cell_center[i] = {(i + 0.5) * h, 0.0};
    for (int i = 0; i + 1 < n_cells; ++i)
        m.interior_edges.push_back({i, i + 1, 1.0, h, 1.0 / h, {1.0, 0.0}});
    m.boundary_edges.push_back({0, 1.0, h / 2, 2.0 / h});
    m.boundary_edges.push_back({n_cells - 1, 1.0, h / 2, 2.0 / h});
    m.finalize();
    return m;
}

Mesh build_rect_mesh(int nx, int ny, double lx, double ly) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: cell counts must be >= 1");
    if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("build_rect_mesh: lengths must be positive");
    Mesh m;
    m.dim = 2;
    m.domain_measure = lx * ly;
    const double hx = lx / nx, hy = ly / ny;
    const int n = nx * ny;
    m.cell_measure.assign(n, hx * hy);
    m.cell_center.resize(n);
    auto id = [nx](int i, int j) { return j * nx + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            m.cell_center[id(i, j)] = {(i + 0.5) * hx, (j + 0.5) * hy};
    // vertical faces between (i,j) and (i+1,j)
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i)
            m.interior_edges.push_back({id(i, j), id(i + 1, j), hy, hx, hy / hx, {1.0, 0.0}});
    // horizontal faces between (i,j) and (i,j+1)
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i)
            m.interior_edges.push_back({id(i, j), id(i, j + 1), hx, hy, hx / hy, {0.0, 1.0}});
    for (int j = 0; j < ny; ++j) {
        m.boundary_edges.push_back({id(0, j), hy, hx / 2, 2 * hy / hx});
        m.boundary_edges.push_back({id(nx - 1, j), hy, hx / 2, 2 * hy / hx});
    }
    for (int i = 0; i < nx; ++i) {
        m.boundary_edges.push_back({id(i, 0), hx, hy / 2, 2 * hx / hy});
        m.boundary_edges.push_back({id(i, ny - 1), hx, hy / 2, 2 * hx / hy});
    }
    m.finalize();
    return m;
}

double jump(const Mesh& mesh, const CellField& field, CellIndex cell, EdgeIndex edge) {
    if (edge < 0 || edge >= mesh.n_edges()) throw std::out_of_range("jump: bad edge index");
    if (!mesh.is_interior(edge)) {
        const auto& be = mesh.boundary_edges[edge - mesh.n_interior_edges()];
        if (be.k != cell) throw std::invalid_argument("jump: edge not incident to cell");
        return 0.0; // mirror value equals V_K
    }
    const auto& ie = mesh.interior_edges[edge];
    if (ie.k == cell) return field[ie.l] - field[ie.k];
    if (ie.l == cell) return field[ie.k] - field[ie.l];
    throw std::invalid_argument("jump: edge not incident to cell");
}

void write_mesh_csv(const Mesh& mesh, const std::string& cells_path,
                    const std::string& edges_path) {
    std::FILE* fc = std::fopen(cells_path.c_str(), "w");
    if (!fc) throw std::runtime_error("cannot open " + cells_path);
    if (mesh.dim == 1)
        std::fprintf(fc, "cell_id,x,measure\n");
    else
        std::fprintf(fc, "cell_id,x,y,measure\n");
    for (int c = 0; c < mesh.n_cells(); ++c) {
        if (mesh.dim == 1)
            std::fprintf(fc, "%d,%.17g,%.17g\n", c, mesh.cell_center[c][0], mesh.cell_measure[c]);
        else
            std::fprintf(fc, "%d,%.17g,%.17g,%.17g\n", c, mesh.cell_center[c][0],
                         mesh.cell_center[c][1], mesh.cell_measure[c]);
    }
    std::fclose(fc);

    std::FILE* fe = std::fopen(edges_path.c_str(), "w");
    if (!fe) throw std::runtime_error("cannot open " + edges_path);
    std::fprintf(fe, "edge_id,cell_a,cell_b,tau\n");
    for (int e = 0; e < mesh.n_interior_edges(); ++e) {
        const auto& ie = mesh.interior_edges[e];
        std::fprintf(fe, "%d,%d,%d,%.17g\n", e, ie.k, ie.l, ie.tau);
    }
    for (int b = 0; b < static_cast<int>(mesh.boundary_edges.size()); ++b) {
        const auto& be = mesh.boundary_edges[b];
        std::fprintf(fe, "%d,%d,-1,%.17g\n", mesh.n_interior_edges() + b, be.k, be.tau);
    }
    std::fclose(fe);
}

} // namespace cdch
