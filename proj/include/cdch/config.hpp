// config.hpp
// Experiment configuration: flat key = value text format, named presets,
// and deterministic initial data (SplitMix64-seeded noise).

#ifndef CDCH_CONFIG_HPP
#define CDCH_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cdch/mesh.hpp"
#include "cdch/model.hpp"
#include "cdch/scheme.hpp"
#include "cdch/simulation.hpp"

namespace cdch {

/// SplitMix64: fixed 64-bit splittable generator, bit-identical across
/// platforms. uniform01 maps the top 53 bits into [0, 1).
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

enum class InitKind { kCosine, kRandom, kConstant, kFromFile };

struct InitialSpec {
    InitKind kind = InitKind::kConstant;
    double kappa = 0.0;            // perturbation amplitude
    int frequency = 1;             // cosine frequency
    std::vector<double> base;      // base fractions, first n_species-1 entries used
    std::uint64_t seed = 42;       // random noise seed
    std::string file;              // snapshot path for kFromFile
};

struct ExperimentConfig {
    std::string name = "custom";
    int dim = 1;
    int nx = 1, ny = 1;
    double lx = 1.0, ly = 1.0;
    int n_species = 3;
    double epsilon = 1.0, beta = 1.0;
    std::vector<double> coeffs_upper; // K_ij for i < j, row-major
    InitialSpec init;
    SolverConfig solver;
    double t_end = 1.0;
    std::vector<double> snapshot_times;
    std::string out_dir = "out";
    double c_p = 1.0, c_sob = 1.0;
    ReferenceKind reference = ReferenceKind::kConstantSteadyState;
    double fit_t_min = 0.0, fit_t_max = 0.0; // rate-fitting window

    Mesh make_mesh() const;
    /// Params with nominal masses from the base fractions; replace the
    /// masses with the realized ones before running.
    ModelParams make_params() const;
};

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

/// Deterministic initial state for the configured initial-condition kind;
/// per-cell sums are exactly 1 (the last species is the left-fold
/// complement). For random noise the stream is one uniform draw per
/// (cell, species 0), then per (cell, species 1), ..., cells in index order.
State build_initial(const ExperimentConfig& config, const Mesh& mesh);

std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

} // namespace cdch

#endif
