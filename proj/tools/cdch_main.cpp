// Command-line driver: run simulations, solve the stationary system,
// re-check stored diagnostics, and print stability reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdch/config.hpp"
#include "cdch/csv.hpp"
#include "cdch/simulation.hpp"
#include "cdch/stationary.hpp"

namespace fs = std::filesystem;
using namespace cdch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverAbort = 2;
constexpr int kExitInvariantViolation = 3;

struct CommonOpts {
    std::string preset_name;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_end;
    std::optional<std::string> snapshots;
};

ExperimentConfig resolve_config(const CommonOpts& o) {
    if (o.preset_name.empty() == o.config_path.empty())
        throw CLI::ValidationError("give exactly one of --preset and --config");
    ExperimentConfig c =
        o.preset_name.empty() ? load_config_file(o.config_path) : preset(o.preset_name);
    if (!o.out_dir.empty()) c.out_dir = o.out_dir;
    if (o.seed) c.init.seed = *o.seed;
    if (o.t_end) c.t_end = *o.t_end;
    if (o.snapshots) {
        c.snapshot_times.clear();
        std::stringstream ss(*o.snapshots);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) c.snapshot_times.push_back(std::stod(item));
    }
    return c;
}

std::string snapshot_name(double t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "snapshot_t%g.csv", t);
    return buf;
}

int cmd_run(const CommonOpts& opts, bool dump_mesh) {
    ExperimentConfig cfg = resolve_config(opts);
    const Mesh mesh = cfg.make_mesh();
    const State initial = build_initial(cfg, mesh);
    ModelParams params = cfg.make_params();
    params.masses = masses_of(mesh, initial); // realized masses drive the reference
    params.validate(mesh.domain_measure);

    fs::create_directories(cfg.out_dir);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "config.txt");
        out << serialize_config(cfg);
    }
    if (dump_mesh)
        write_mesh_csv(mesh, (fs::path(cfg.out_dir) / "mesh_cells.csv").string(),
                       (fs::path(cfg.out_dir) / "mesh_edges.csv").string());

    RunOptions ropts;
    ropts.t_end = cfg.t_end;
    ropts.reference = cfg.reference;
    ropts.snapshot_times = cfg.snapshot_times;

    try {
        const Trajectory traj = run(mesh, params, initial, cfg.solver, ropts);
        write_series_csv((fs::path(cfg.out_dir) / "series.csv").string(), traj.steps);
        for (const auto& [t, state] : traj.snapshots)
            write_snapshot_csv((fs::path(cfg.out_dir) / snapshot_name(t)).string(), mesh,
                               state);
        const auto& last = traj.steps.back();
        std::printf("%s: %zu accepted steps to t = %.6g, E = %.12g, min_u = %.3e\n",
                    cfg.name.c_str(), traj.steps.size() - 1, last.time,
                    last.energy.e_total, last.min_u);
        return kExitOk;
    } catch (const SolverAbort& e) {
        std::fprintf(stderr, "solver abort: %s (last residual %.3e)\n", e.what(),
                     e.last_residual_norm);
        return kExitSolverAbort;
    }
}

int cmd_stationary(const CommonOpts& opts, const std::string& guess_path) {
    ExperimentConfig cfg = resolve_config(opts);
    const Mesh mesh = cfg.make_mesh();
    ModelParams params = cfg.make_params();

    CellField guess;
    if (!guess_path.empty()) {
        const State s = read_snapshot_csv(guess_path);
        if (s.n_cells() != mesh.n_cells())
            throw std::runtime_error("guess snapshot does not match the mesh");
        guess = s.values[0];
        params.masses = masses_of(mesh, s); // stay on the seed's mass shell
    } else {
        guess.assign(mesh.n_cells(), params.masses[0] / mesh.domain_measure);
    }
    const double m0 = params.masses[0];

    try {
        const StationarySolution sol = solve_stationary(mesh, params, m0, guess);
        fs::create_directories(cfg.out_dir);
        write_snapshot_csv((fs::path(cfg.out_dir) / "stationary.csv").string(), mesh,
                           sol.species);
        const EnergyBreakdown e = discrete_energy(mesh, params, sol.species);
        std::ostringstream os;
        os.precision(17);
        os << "multiplier = " << sol.multiplier << "\n"
           << "residual_norm = " << sol.residual_norm << "\n"
           << "delta = " << sol.delta << "\n"
           << "e_total = " << e.e_total << "\n"
           << "iterations = " << sol.iterations << "\n";
        std::ofstream txt(fs::path(cfg.out_dir) / "stationary.txt");
        txt << os.str();
        std::fputs(os.str().c_str(), stdout);
        return kExitOk;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "stationary solve failed: %s\n", e.what());
        return kExitSolverAbort;
    }
}

int cmd_verify(const std::string& series_path, double mass_tol) {
    const auto series = read_series_csv(series_path);
    const auto violations = verify_series(series, mass_tol);
    if (violations.empty()) {
        std::printf("verify: %zu rows, all invariants hold\n", series.size());
        return kExitOk;
    }
    for (const auto& v : violations)
        std::fprintf(stderr, "verify: step %ld: %s (magnitude %.6e)\n", v.step,
                     v.what.c_str(), v.magnitude);
    return kExitInvariantViolation;
}

int cmd_report(const CommonOpts& opts) {
    ExperimentConfig cfg = resolve_config(opts);
    ModelParams params = cfg.make_params();
    const double measure = (cfg.dim == 1) ? cfg.lx : cfg.lx * cfg.ly;
    const StabilityReport r = stability_report(params, measure, cfg.c_p, cfg.c_sob);
    std::fputs(r.to_text().c_str(), stdout);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume simulator for a multi-species cross-diffusion "
                 "Cahn-Hilliard system"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool dump_mesh = false;
    std::string guess_path, series_path;
    double mass_tol = 1e-9;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--preset", opts.preset_name, "named experiment preset");
        sub->add_option("--config", opts.config_path, "config file path");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", opts.seed, "noise seed override");
        sub->add_option("--t-end", opts.t_end, "time horizon override");
        sub->add_option("--snapshots", opts.snapshots, "comma-separated snapshot times");
    };

    CLI::App* c_run = app.add_subcommand("run", "simulate and write diagnostics + snapshots");
    add_common(c_run);
    c_run->add_flag("--dump-mesh", dump_mesh, "also write mesh CSV files");

    CLI::App* c_stat = app.add_subcommand("stationary", "solve the stationary system");
    add_common(c_stat);
    c_stat->add_option("--guess", guess_path, "snapshot CSV used as the initial guess");

    CLI::App* c_verify = app.add_subcommand("verify", "re-check invariants on a stored series");
    c_verify->add_option("--series", series_path, "series.csv path")->required();
    c_verify->add_option("--mass-tol", mass_tol, "mass drift tolerance");

    CLI::App* c_report = app.add_subcommand("report", "print the stability report");
    add_common(c_report);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(opts, dump_mesh);
        if (c_stat->parsed()) return cmd_stationary(opts, guess_path);
        if (c_verify->parsed()) return cmd_verify(series_path, mass_tol);
        if (c_report->parsed()) return cmd_report(opts);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
