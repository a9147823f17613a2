#include "cdch/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cdch/csv.hpp"

namespace cdch {

Mesh ExperimentConfig::make_mesh() const {
    if (dim == 1) return build_interval_mesh(nx, lx);
    if (dim == 2) return build_rect_mesh(nx, ny, lx, ly);
    throw std::invalid_argument("config: dim must be 1 or 2");
}

ModelParams ExperimentConfig::make_params() const {
    ModelParams p;
    p.n_species = n_species;
    p.epsilon = epsilon;
    p.beta = beta;
    p.coeffs = Eigen::MatrixXd::Zero(n_species, n_species);
    const int expected = n_species * (n_species - 1) / 2;
    if (static_cast<int>(coeffs_upper.size()) != expected)
        throw std::invalid_argument("config: wrong number of cross-diffusion coefficients");
    int idx = 0;
    for (int i = 0; i < n_species; ++i)
        for (int j = i + 1; j < n_species; ++j) {
            p.coeffs(i, j) = coeffs_upper[idx];
            p.coeffs(j, i) = coeffs_upper[idx];
            ++idx;
        }
    const double measure = (dim == 1) ? lx : lx * ly;
    if (static_cast<int>(init.base.size()) >= n_species - 1) {
        p.masses.resize(n_species);
        double acc = 0.0;
        for (int i = 0; i + 1 < n_species; ++i) {
            p.masses[i] = init.base[i] * measure;
            acc += init.base[i];
        }
        p.masses[n_species - 1] = (1.0 - acc) * measure;
    }
    return p;
}

std::vector<std::string> preset_names() {
    return {"stable-1d",        "weak-1d",         "nonconvex-1d-k1",
            "nonconvex-1d-k2",  "spinodal-2d",     "spinodal-2d-small"};
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.n_species = 3;
    c.coeffs_upper = {0.2, 1.0, 0.1}; // K01, K02, K12
    c.c_p = 1.0;
    c.c_sob = 1.0;
    if (name == "stable-1d" || name == "weak-1d") {
        c.dim = 1;
        c.nx = 100;
        c.lx = 1.0;
        c.epsilon = (name == "stable-1d") ? 4.0 : 0.5;
        c.beta = (name == "stable-1d") ? 1.0 : 2.0;
        c.init = {InitKind::kCosine, 1.0, 1, {0.25, 0.25}, 42, ""};
        c.solver.dt_max = 1e-3;
        c.t_end = 10.0;
        c.snapshot_times = {0.0, 0.5, 10.0};
        c.reference = ReferenceKind::kConstantSteadyState;
        c.fit_t_min = 1.0;
        c.fit_t_max = 5.0;
    } else if (name == "nonconvex-1d-k1" || name == "nonconvex-1d-k2") {
        const bool k1 = name == "nonconvex-1d-k1";
        c.dim = 1;
        c.nx = 100;
        c.lx = 1.0;
        c.epsilon = 0.1;
        c.beta = 10.0;
        c.init = {InitKind::kCosine, 1.0, k1 ? 1 : 2, {0.25, 0.25}, 42, ""};
        c.solver.dt_max = 1e-3;
        c.t_end = k1 ? 8.0 : 2.0;
        c.snapshot_times = k1 ? std::vector<double>{0.0, 0.4, 8.0}
                              : std::vector<double>{0.0, 0.01, 2.0};
        c.reference = ReferenceKind::kFinalState;
        c.fit_t_min = k1 ? 2.0 : 0.5;
        c.fit_t_max = k1 ? 6.0 : 1.5;
    } else if (name == "spinodal-2d" || name == "spinodal-2d-small") {
        c.dim = 2;
        c.nx = c.ny = (name == "spinodal-2d") ? 150 : 64;
        c.lx = c.ly = 1.0;
        c.epsilon = 1e-3;
        c.beta = 5.0;
        c.init = {InitKind::kRandom, 1e-2, 1, {0.5, 0.4}, 42, ""};
        c.solver.dt_max = 5e-3;
        c.t_end = 1.5;
        c.snapshot_times = {0.0, 0.06, 0.13, 0.49, 1.5};
        c.reference = ReferenceKind::kConstantSteadyState;
        c.fit_t_min = 0.5;
        c.fit_t_max = 1.5;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return c;
}

State build_initial(const ExperimentConfig& config, const Mesh& mesh) {
    const int ns = config.n_species;
    if (ns < 2) throw std::invalid_argument("build_initial: need at least two species");
    const auto& init = config.init;

    auto finish_complement = [&](State& s) {
        s.values.resize(ns);
        s.values[ns - 1].assign(mesh.n_cells(), 0.0);
        for (int c = 0; c < mesh.n_cells(); ++c) {
            double acc = 0.0;
            for (int i = 0; i + 1 < ns; ++i) acc += s.values[i][c];
            const double last = 1.0 - acc;
            if (!(last >= 0.0) || !(last <= 1.0))
                throw std::domain_error("build_initial: complement species leaves [0,1]");
            s.values[ns - 1][c] = last;
        }
        s.time = 0.0;
    };

    switch (init.kind) {
    case InitKind::kCosine: {
        if (ns != 3)
            throw std::invalid_argument("build_initial: cosine profile is three-species");
        const double kappa = init.kappa;
        const int k = init.frequency;
        if (!(kappa >= 0.0) || kappa > 1.0 || k < 1)
            throw std::invalid_argument("build_initial: need kappa in [0,1] and frequency >= 1");
        auto profile = [kappa, k](const std::array<double, 2>& x) {
            return 0.25 * (1.0 + kappa * std::cos(k * std::numbers::pi * x[0]));
        };
        State s = project_initial({profile, profile}, mesh);
        finish_complement(s);
        return s;
    }
    case InitKind::kConstant: {
        if (static_cast<int>(init.base.size()) < ns - 1)
            throw std::invalid_argument("build_initial: missing base fractions");
        State s;
        s.values.resize(ns);
        for (int i = 0; i + 1 < ns; ++i) {
            if (!(init.base[i] >= 0.0) || !(init.base[i] <= 1.0))
                throw std::domain_error("build_initial: base fraction outside [0,1]");
            s.values[i].assign(mesh.n_cells(), init.base[i]);
        }
        finish_complement(s);
        return s;
    }
    case InitKind::kRandom: {
        if (static_cast<int>(init.base.size()) < ns - 1)
            throw std::invalid_argument("build_initial: missing base fractions");
        SplitMix64 rng(init.seed);
        State s;
        s.values.resize(ns);
        for (int i = 0; i + 1 < ns; ++i) {
            s.values[i].assign(mesh.n_cells(), 0.0);
            for (int c = 0; c < mesh.n_cells(); ++c) {
                const double eta = rng.uniform01();
                const double v = init.base[i] + 2.0 * init.kappa * (eta - 0.5);
                if (!(v >= 0.0) || !(v <= 1.0))
                    throw std::domain_error("build_initial: perturbed value outside [0,1]");
                s.values[i][c] = v;
            }
        }
        finish_complement(s);
        return s;
    }
    case InitKind::kFromFile: {
        State s = read_snapshot_csv(init.file);
        if (s.n_cells() != mesh.n_cells() || s.n_species() != ns)
            throw std::invalid_argument("build_initial: snapshot does not match mesh/config");
        s.time = 0.0;
        return s;
    }
    }
    throw std::logic_error("build_initial: unreachable");
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string init_kind_name(InitKind k) {
    switch (k) {
    case InitKind::kCosine: return "cosine";
    case InitKind::kRandom: return "random";
    case InitKind::kConstant: return "constant";
    case InitKind::kFromFile: return "file";
    }
    return "?";
}

InitKind init_kind_from(const std::string& s) {
    if (s == "cosine") return InitKind::kCosine;
    if (s == "random") return InitKind::kRandom;
    if (s == "constant") return InitKind::kConstant;
    if (s == "file") return InitKind::kFromFile;
    throw std::invalid_argument("config: unknown init.kind '" + s + "'");
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out;
}

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

} // namespace

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "name = " << c.name << "\n";
    os << "mesh.dim = " << c.dim << "\n";
    os << "mesh.nx = " << c.nx << "\n";
    os << "mesh.ny = " << c.ny << "\n";
    os << "mesh.lx = " << fmt(c.lx) << "\n";
    os << "mesh.ly = " << fmt(c.ly) << "\n";
    os << "model.n_species = " << c.n_species << "\n";
    os << "model.epsilon = " << fmt(c.epsilon) << "\n";
    os << "model.beta = " << fmt(c.beta) << "\n";
    int idx = 0;
    for (int i = 0; i < c.n_species; ++i)
        for (int j = i + 1; j < c.n_species; ++j)
            os << "model.coeff." << i << "." << j << " = " << fmt(c.coeffs_upper[idx++])
               << "\n";
    os << "init.kind = " << init_kind_name(c.init.kind) << "\n";
    os << "init.kappa = " << fmt(c.init.kappa) << "\n";
    os << "init.frequency = " << c.init.frequency << "\n";
    os << "init.base = " << join(c.init.base) << "\n";
    os << "init.seed = " << c.init.seed << "\n";
    if (!c.init.file.empty()) os << "init.file = " << c.init.file << "\n";
    os << "solver.newton_tol = " << fmt(c.solver.newton_tol) << "\n";
    os << "solver.newton_max_iter = " << c.solver.newton_max_iter << "\n";
    os << "solver.dt_max = " << fmt(c.solver.dt_max) << "\n";
    os << "solver.dt_min = " << fmt(c.solver.dt_min) << "\n";
    os << "solver.dt_grow = " << fmt(c.solver.dt_grow) << "\n";
    os << "solver.dt_shrink = " << fmt(c.solver.dt_shrink) << "\n";
    os << "run.t_end = " << fmt(c.t_end) << "\n";
    os << "run.snapshots = " << join(c.snapshot_times) << "\n";
    os << "run.out_dir = " << c.out_dir << "\n";
    os << "run.reference = "
       << (c.reference == ReferenceKind::kConstantSteadyState ? "constant" : "final") << "\n";
    os << "stability.c_p = " << fmt(c.c_p) << "\n";
    os << "stability.c_sob = " << fmt(c.c_sob) << "\n";
    os << "fit.t_min = " << fmt(c.fit_t_min) << "\n";
    os << "fit.t_max = " << fmt(c.fit_t_max) << "\n";
    return os.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: missing '=' on line " + std::to_string(lineno));
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    ExperimentConfig c;
    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument(std::string("config: missing key ") + key);
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_or = [&](const char* key, const std::string& fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    c.name = take_or("name", "custom");
    c.dim = std::stoi(take("mesh.dim"));
    c.nx = std::stoi(take("mesh.nx"));
    c.ny = std::stoi(take_or("mesh.ny", "1"));
    c.lx = std::stod(take_or("mesh.lx", "1"));
    c.ly = std::stod(take_or("mesh.ly", "1"));
    c.n_species = std::stoi(take("model.n_species"));
    c.epsilon = std::stod(take("model.epsilon"));
    c.beta = std::stod(take("model.beta"));
    c.coeffs_upper.clear();
    for (int i = 0; i < c.n_species; ++i)
        for (int j = i + 1; j < c.n_species; ++j) {
            std::ostringstream key;
            key << "model.coeff." << i << "." << j;
            c.coeffs_upper.push_back(std::stod(take(key.str().c_str())));
        }
    c.init.kind = init_kind_from(take("init.kind"));
    c.init.kappa = std::stod(take_or("init.kappa", "0"));
    c.init.frequency = std::stoi(take_or("init.frequency", "1"));
    c.init.base = split_doubles(take_or("init.base", ""));
    c.init.seed = std::stoull(take_or("init.seed", "42"));
    c.init.file = take_or("init.file", "");
    c.solver.newton_tol = std::stod(take_or("solver.newton_tol", "1e-10"));
    c.solver.newton_max_iter = std::stoi(take_or("solver.newton_max_iter", "50"));
    c.solver.dt_max = std::stod(take("solver.dt_max"));
    c.solver.dt_min = std::stod(take_or("solver.dt_min", "1e-12"));
    c.solver.dt_grow = std::stod(take_or("solver.dt_grow", "1.2"));
    c.solver.dt_shrink = std::stod(take_or("solver.dt_shrink", "0.5"));
    c.t_end = std::stod(take("run.t_end"));
    c.snapshot_times = split_doubles(take_or("run.snapshots", ""));
    c.out_dir = take_or("run.out_dir", "out");
    const std::string ref = take_or("run.reference", "constant");
    if (ref == "constant")
        c.reference = ReferenceKind::kConstantSteadyState;
    else if (ref == "final")
        c.reference = ReferenceKind::kFinalState;
    else
        throw std::invalid_argument("config: run.reference must be constant or final");
    c.c_p = std::stod(take_or("stability.c_p", "1"));
    c.c_sob = std::stod(take_or("stability.c_sob", "1"));
    c.fit_t_min = std::stod(take_or("fit.t_min", "0"));
    c.fit_t_max = std::stod(take_or("fit.t_max", "0"));
    if (!kv.empty())
        throw std::invalid_argument("config: unknown key '" + kv.begin()->first + "'");
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace cdch
