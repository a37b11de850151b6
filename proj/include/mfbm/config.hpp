#pragma once
// Experiment configuration: sectioned key-value files, eager validation,
// seed handling, and the run manifest.
//
// Grammar: INI-style lines. `[section]` opens a section; `key = value` sets
// a key; `#` or `;` starts a comment; blank lines ignored. Values are
// scalars, `true`/`false`, comma-separated real lists, or bare strings.

#include "mfbm/coefficients.hpp"
#include "mfbm/fbm.hpp"
#include "mfbm/solvers.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace mfbm {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    // [space] dim, generator (dirichlet | explicit), eigenvalues
    int dim = 1;
    std::string generator = "dirichlet";
    std::vector<double> eigenvalues;

    // [covariance] q1, q2 (empty -> identity; one value broadcasts)
    std::vector<double> q1, q2;

    // [hurst] H, alpha (alpha < 0 -> midpoint of (1-H, 1/2))
    double H = 0.7;
    double alpha = -1.0;

    // [family] name plus scalar parameters forwarded to the registry
    std::string family = "linear_dissipative";
    std::map<std::string, double> family_params;

    // [scales] epsilon/delta schedules (single values broadcast),
    // h_exponent p with h(eps) = eps^{-p}, Khasminskii block
    std::vector<double> epsilons{0.1};
    std::vector<double> deltas{0.01};
    double h_exponent = 0.0;
    double block = 0.0;

    // [grid] horizon, slow grid cells, fast substeps (0 -> auto), x0, y0
    double T = 1.0;
    int slow_steps = 256;
    int substeps = 0;
    std::vector<double> x0, y0;

    // [mc]
    int replicas = 1000;
    std::uint64_t seed = 1;
    int event_mode = 0;
    double event_threshold = 0.0;
    double rate_reference = std::numeric_limits<double>::quiet_NaN();
    bool parallel = true;

    // [output]
    std::string out_dir = "out";

    SpectralSpace space() const;
    HurstParam hurst() const;
    CoefficientSystem coefficients(const SpectralSpace& space) const;
    std::vector<ScaleParams> schedule() const;
    SimSetup setup(const SpectralSpace& space) const;
};

// Parses and validates; every violation names the section, key, and the
// admissible range. parse_config works on in-memory text, load_config on a
// file (missing file is a config error).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// MFBM_SEED in the environment overrides the configured master seed
void apply_env_overrides(ExperimentConfig& config);

// FNV-1a of the raw config text, hex-encoded; keys the manifest
std::string config_hash(const std::string& text);

// One manifest per command run referencing every file it wrote
std::string manifest_json(const std::string& command, const std::string& cfg_hash,
                          std::uint64_t seed, const std::vector<std::string>& outputs);

} // namespace mfbm
