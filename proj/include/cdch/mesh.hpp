// mesh.hpp
// Admissible two-point meshes (1D intervals, 2D Cartesian grids) and the
// associated discrete calculus: mirror values, oriented jumps, transmissibilities.

#ifndef CDCH_MESH_HPP
#define CDCH_MESH_HPP

#include <array>
#include <string>
#include <vector>

namespace cdch {

using CellIndex = int;
using EdgeIndex = int;

/// Scalar field with one value per cell.
using CellField = std::vector<double>;

/// An admissible mesh: convex cells with centers such that the
/// center-to-center vector of two neighbours is orthogonal to their shared
/// face. Edges are split into interior edges (ordered pair of cells; signed
/// quantities are always relative to a stated viewing cell) and boundary
/// edges (owner cell only; fluxes never use them, realizing no-flux walls).
struct Mesh {
    struct InteriorEdge {
        CellIndex k = -1, l = -1; // ordered pair; k is the owner
        double m_sigma = 0.0;     // (d-1)-measure of the face
        double d_sigma = 0.0;     // |x_L - x_K|
        double tau = 0.0;         // m_sigma / d_sigma
        std::array<double, 2> normal{0.0, 0.0}; // unit, from k to l
    };
    struct BoundaryEdge {
        CellIndex k = -1;
        double m_sigma = 0.0;
        double d_sigma = 0.0; // |x_K - x_sigma|
        double tau = 0.0;
    };

    int dim = 1;
    std::vector<double> cell_measure;
    std::vector<std::array<double, 2>> cell_center;
    std::vector<InteriorEdge> interior_edges;
    std::vector<BoundaryEdge> boundary_edges;

    // Incident edges per cell, global edge ids: interior edges occupy
    // [0, n_interior_edges()), boundary edges follow.
    std::vector<std::vector<EdgeIndex>> cell_edges;

    // Sum of tau over the interior edges of each cell (the diagonal of the
    // discrete Neumann Laplacian).
    std::vector<double> tau_sum_int;

    double domain_measure = 0.0;

    int n_cells() const { return static_cast<int>(cell_measure.size()); }
    int n_interior_edges() const { return static_cast<int>(interior_edges.size()); }
    int n_edges() const { return n_interior_edges() + static_cast<int>(boundary_edges.size()); }
    bool is_interior(EdgeIndex e) const { return e < n_interior_edges(); }

    /// Rebuild adjacency and tau sums from the edge lists. Must be called
    /// after assembling an external mesh by hand.
    void finalize();

    /// Check admissibility: positive measures, tau > 0, consistent
    /// adjacency, cell measures summing to the domain measure, and (when
    /// normals are set) orthogonality of x_L - x_K to the face within tol.
    void validate(double tol = 1e-10) const;
};

/// Uniform mesh of the interval (0, length).
Mesh build_interval_mesh(int n_cells, double length);

/// Uniform Cartesian mesh of the rectangle (0, lx) x (0, ly).
Mesh build_rect_mesh(int nx, int ny, double lx, double ly);

/// Oriented jump D_{K sigma} V = V_{K sigma} - V_K of a cell field across an
/// edge, seen from `cell`. Zero on boundary edges (the mirror value is V_K).
/// Throws if the edge is not incident to the cell.
double jump(const Mesh& mesh, const CellField& field, CellIndex cell, EdgeIndex edge);

/// Dump the mesh as two CSV files: cells (cell_id, center, measure) and
/// edges (edge_id, cell_a, cell_b, tau); boundary edges have cell_b = -1.
void write_mesh_csv(const Mesh& mesh, const std::string& cells_path,
                    const std::string& edges_path);

} // namespace cdch

#endif
