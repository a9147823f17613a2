#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cdch/config.hpp"
#include "cdch/csv.hpp"

using namespace cdch;

namespace {

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.name == b.name && a.dim == b.dim && a.nx == b.nx && a.ny == b.ny &&
           a.lx == b.lx && a.ly == b.ly && a.n_species == b.n_species &&
           a.epsilon == b.epsilon && a.beta == b.beta && a.coeffs_upper == b.coeffs_upper &&
           a.init.kind == b.init.kind && a.init.kappa == b.init.kappa &&
           a.init.frequency == b.init.frequency && a.init.base == b.init.base &&
           a.init.seed == b.init.seed && a.init.file == b.init.file &&
           a.solver.newton_tol == b.solver.newton_tol &&
           a.solver.newton_max_iter == b.solver.newton_max_iter &&
           a.solver.dt_max == b.solver.dt_max && a.solver.dt_min == b.solver.dt_min &&
           a.solver.dt_grow == b.solver.dt_grow && a.solver.dt_shrink == b.solver.dt_shrink &&
           a.t_end == b.t_end && a.snapshot_times == b.snapshot_times &&
           a.out_dir == b.out_dir && a.c_p == b.c_p && a.c_sob == b.c_sob &&
           a.reference == b.reference && a.fit_t_min == b.fit_t_min &&
           a.fit_t_max == b.fit_t_max;
}

} // namespace

TEST_CASE("splitmix64 is pinned") {
    SplitMix64 rng(42);
    CHECK(rng.next() == 0xbdd732262feb6e95ull);
    CHECK(rng.next() == 0x28efe333b266f103ull);
    SplitMix64 rng2(42);
    CHECK(rng2.uniform01() == doctest::Approx(0.7415648787718233).epsilon(1e-16));
    CHECK(rng2.uniform01() == doctest::Approx(0.1599103928769201).epsilon(1e-16));
    for (int i = 0; i < 1000; ++i) {
        const double v = rng2.uniform01();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("presets") {
    const ExperimentConfig stable = preset("stable-1d");
    CHECK(stable.epsilon == 4.0);
    CHECK(stable.beta == 1.0);
    CHECK(stable.n_species == 3);
    CHECK(stable.nx == 100);
    CHECK(stable.solver.dt_max == 1e-3);
    CHECK(stable.t_end == 10.0);
    const ModelParams p = stable.make_params();
    CHECK(p.masses == std::vector<double>{0.25, 0.25, 0.5});
    CHECK(p.coeffs(0, 1) == 0.2);
    CHECK(p.coeffs(0, 2) == 1.0);
    CHECK(p.coeffs(1, 2) == 0.1);

    const ExperimentConfig spin = preset("spinodal-2d");
    CHECK(spin.make_mesh().n_cells() == 22500);
    CHECK(spin.solver.dt_max == 5e-3);
    CHECK(spin.epsilon == 1e-3);
    CHECK(spin.beta == 5.0);

    const ExperimentConfig small = preset("spinodal-2d-small");
    CHECK(small.make_mesh().n_cells() == 64 * 64);

    CHECK(preset("weak-1d").epsilon == 0.5);
    CHECK(preset("nonconvex-1d-k2").init.frequency == 2);
    CHECK(preset("nonconvex-1d-k1").t_end == 8.0);

    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("cosine initial data") {
    const ExperimentConfig cfg = preset("stable-1d");
    const Mesh mesh = cfg.make_mesh();
    const State s = build_initial(cfg, mesh);
    // profile at the first cell center
    const double x0 = mesh.cell_center[0][0];
    const double expect = 0.25 * (1.0 + std::cos(std::acos(-1.0) * x0));
    CHECK(s.values[0][0] == doctest::Approx(expect).epsilon(1e-14));
    CHECK(s.values[1][0] == s.values[0][0]);
    // kappa = 1 grazes the box but cell averages stay interior
    CHECK(s.min_value() > 0.0);
    CHECK(s.max_value() < 1.0);
    CHECK(s.volume_filling_defect() == 0.0);
    const auto m = masses_of(mesh, s);
    CHECK(m[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m[2] == doctest::Approx(0.5).epsilon(1e-12));

    ExperimentConfig flat = cfg;
    flat.init.kappa = 0.0;
    const State c = build_initial(flat, mesh);
    for (int cc = 0; cc < mesh.n_cells(); ++cc) {
        CHECK(c.values[0][cc] == 0.25);
        CHECK(c.values[2][cc] == 0.5);
    }
}

TEST_CASE("random initial data is deterministic in the seed") {
    const ExperimentConfig cfg = preset("spinodal-2d-small");
    const Mesh mesh = cfg.make_mesh();
    const State a = build_initial(cfg, mesh);
    const State b = build_initial(cfg, mesh);
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < mesh.n_cells(); ++c)
            CHECK(a.values[i][c] == b.values[i][c]); // bit identical

    // documented stream order: species 0 over all cells, then species 1
    SplitMix64 rng(cfg.init.seed);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const double eta = rng.uniform01();
        const double expect = 0.5 + 2.0 * cfg.init.kappa * (eta - 0.5);
        if (c < 5) CHECK(a.values[0][c] == expect);
    }

    ExperimentConfig other = cfg;
    other.init.seed = 43;
    const State d = build_initial(other, mesh);
    int differing = 0;
    for (int c = 0; c < mesh.n_cells(); ++c)
        if (d.values[0][c] != a.values[0][c]) ++differing;
    CHECK(differing > mesh.n_cells() / 2);

    CHECK(a.volume_filling_defect() == 0.0);
    CHECK(a.min_value() > 0.0);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        CHECK(std::abs(a.values[0][c] - 0.5) <= cfg.init.kappa);
        CHECK(std::abs(a.values[1][c] - 0.4) <= cfg.init.kappa);
    }
}

TEST_CASE("constant and file-backed initial data") {
    namespace fs = std::filesystem;
    ExperimentConfig cfg = preset("stable-1d");
    cfg.init.kind = InitKind::kConstant;
    cfg.init.base = {0.3, 0.3};
    const Mesh mesh = cfg.make_mesh();
    const State c = build_initial(cfg, mesh);
    CHECK(c.values[2][0] == doctest::Approx(0.4).epsilon(1e-15));

    const fs::path dir = fs::temp_directory_path() / "cdch_init_file";
    fs::create_directories(dir);
    const std::string path = (dir / "init.csv").string();
    write_snapshot_csv(path, mesh, c);
    ExperimentConfig from_file = cfg;
    from_file.init.kind = InitKind::kFromFile;
    from_file.init.file = path;
    const State d = build_initial(from_file, mesh);
    for (int i = 0; i < 3; ++i)
        for (int cc = 0; cc < mesh.n_cells(); ++cc)
            CHECK(d.values[i][cc] == c.values[i][cc]);
}

TEST_CASE("config round trip") {
    for (const std::string& name : preset_names()) {
        const ExperimentConfig c = preset(name);
        const ExperimentConfig back = parse_config_text(serialize_config(c));
        CHECK(same_config(c, back));
    }
    CHECK_THROWS_AS(parse_config_text("mesh.dim = 1\nbogus_key = 3\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("mesh.dim 1\n"), std::invalid_argument);
}
