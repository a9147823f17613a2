#ifndef CDCH_STATE_HPP
#define CDCH_STATE_HPP

#include <vector>

#include "cdch/mesh.hpp"

namespace cdch {

/// Volume fractions of all species at one time level, species-major.
struct State {
    std::vector<CellField> values; // values[i][K] = U_{i,K}
    double time = 0.0;

    int n_species() const { return static_cast<int>(values.size()); }
    int n_cells() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }

    double& at(int species, int cell) { return values[species][cell]; }
    double at(int species, int cell) const { return values[species][cell]; }

    double min_value() const;
    double max_value() const;
    /// max_K |sum_i U_{i,K} - 1|, species summed in index order.
    double volume_filling_defect() const;
};

/// Per-species masses sum_K m_K U_{i,K}.
std::vector<double> masses_of(const Mesh& mesh, const State& u);

} // namespace cdch

#endif
