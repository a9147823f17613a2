// csv.hpp
// File formats: the diagnostics series stream, state snapshots, and the
// series re-checker used by the verify command. All floating-point output
// carries 17 significant digits.

#ifndef CDCH_CSV_HPP
#define CDCH_CSV_HPP

#include <string>
#include <vector>

#include "cdch/diagnostics.hpp"
#include "cdch/mesh.hpp"
#include "cdch/state.hpp"

namespace cdch {

/// Header: step,time,dt,E_total,E_conv,E_conc,dissipation,RE,
///         mass_0..mass_n,min_u,max_u,el_residual,newton_iters
void write_series_csv(const std::string& path, const std::vector<StepDiagnostics>& series);

/// Reads back a series written by write_series_csv. energy_slack is
/// reconstructed from the E_total, dt and dissipation columns.
std::vector<StepDiagnostics> read_series_csv(const std::string& path);

/// Header: cell_id,x[,y],u_0..u_n
void write_snapshot_csv(const std::string& path, const Mesh& mesh, const State& state);
State read_snapshot_csv(const std::string& path);

/// Re-check the invariants recoverable from a stored series: mass constancy,
/// positivity, nonnegative dissipation, and the per-step energy inequality.
std::vector<Violation> verify_series(const std::vector<StepDiagnostics>& series,
                                     double mass_tol = 1e-9,
                                     double tol_slack_coef = 1e-10);

} // namespace cdch

#endif
