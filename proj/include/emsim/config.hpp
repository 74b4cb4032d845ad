#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emsim/ensemble.hpp"
#include "emsim/photonics.hpp"
#include "emsim/registry.hpp"
#include "emsim/spam.hpp"

namespace emsim {

struct ScalingPoint {
    std::string label;
    double n_emitter = 2.3;
    double n_sys = 1024.0;
    double p_c = 1.0;
    double k_max = 11.0;
};

/// Everything a run needs, resolved from defaults, then the config file,
/// then command-line flags (flags win). One master seed feeds every module.
struct RunConfig {
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 1;

    EnsembleConfig ensemble;
    FrequencyGrid grid;
    TuningLaw law;

    std::vector<double> pc_ratios;
    std::vector<int> pc_n_qubits{100, 300, 1000, 3000};
    int pc_trials = 10;

    SynthesisParams synth;
    RegistryParams registry;
    int n_sys = 1;
    std::string frames_dir; ///< consume an on-disk stack instead of synthesizing

    ReadoutModel spam;
    std::vector<double> c_th_list;
    std::string records_csv; ///< measured-data ingestion

    LifetimeSet lifetimes;
    PhotonBudget budget;

    std::vector<ScalingPoint> scaling_points;
    double fov_diameter_um = 2650.0;
    double spot_spacing_um = 2.52;

    RunConfig();
    void validate() const;
};

/// Overrides carried by command-line flags.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
};

/// Loads a config file and applies overrides. Rejects unknown keys,
/// reporting the offending field path. An empty path yields defaults plus
/// overrides.
RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});
RunConfig apply_overrides(RunConfig config, const ConfigOverrides& overrides);

/// Writes the fully resolved configuration next to a run's outputs.
void save_resolved_config(const std::filesystem::path& path, const RunConfig& config);

} // namespace emsim
