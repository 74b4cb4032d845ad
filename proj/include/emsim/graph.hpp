#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "emsim/ensemble.hpp"

namespace emsim {

/// Connected components of the tunability-overlap graph.
struct ConnectivityReport {
    std::vector<std::vector<int>> components; ///< emitter ids, partition of the ensemble
    int largest_size = 0;
    double p_c = 0.0; ///< largest_size / n_qubit
    /// Comparison metric: nodes that belong to any component of size >= 2.
    int non_singleton_nodes = 0;
};

/// p_c versus mean-tunability ratio, one row per (ratio, system size).
struct PcCurve {
    std::vector<double> ratios;
    std::vector<int> n_qubits;
    /// Indexed [ratio][size].
    std::vector<std::vector<double>> p_c_mean;
    std::vector<std::vector<double>> p_c_stderr;
    int trials = 0;
};

/// Discrete channel view: per-channel membership plus interference edges.
struct ChannelGraph {
    std::vector<std::vector<int>> members;      ///< members[k-1] = emitter ids reaching channel k
    std::vector<std::pair<int, int>> edges;     ///< i < j, shared channel + linewidth gate
    std::vector<std::vector<int>> node_channels; ///< node_channels[id] = reachable channels
};

struct ScalingEstimate {
    double n_qubit = 0.0;
    double n_link = 0.0; ///< per-channel all-to-all degree, clamped to n_qubit
};

/// Connected components of the interval graph on tuning intervals, by the
/// sort-and-sweep: order by left endpoint, extend a running max right
/// endpoint, cut a component when the next left endpoint exceeds it.
/// Touching intervals count as connected. Throws std::domain_error on an
/// empty ensemble.
ConnectivityReport interval_components(const std::vector<Emitter>& ensemble, const TuningLaw& law);

/// Monte-Carlo sweep of p_c over tunability ratios and system sizes.
/// Each trial sets mean_tuning = ratio * v_inh and draws a fresh ensemble
/// from a seed derived from (base seed, ratio index, size index, trial), so
/// the sweep is reproducible and trials can run in parallel. `threads` <= 1
/// runs serially; results are identical either way.
PcCurve pc_sweep(const EnsembleConfig& base_config, const TuningLaw& law,
                 const std::vector<double>& ratios, const std::vector<int>& n_qubit_list,
                 int trials, int threads = 1);

/// Channel-shared connectivity: edge iff two emitters reach a common channel
/// and both linewidths pass the interference gate (default 60 MHz, twice the
/// transform limit).
ChannelGraph channel_graph(const std::vector<Emitter>& ensemble, const TuningLaw& law,
                           const FrequencyGrid& grid, double linewidth_limit_mhz = 60.0);

/// N_qubit = n_emitter * n_sys * p_c * k_max, with the companion per-channel
/// all-to-all link count.
ScalingEstimate scaling_estimate(double n_emitter, double n_sys, double p_c, double k_max);

/// Diffraction-limited spot capacity of a circular field of view:
/// floor(pi * (d/2)^2 / s^2).
long long resolvable_spots(double fov_diameter_um, double spot_spacing_um);

} // namespace emsim
