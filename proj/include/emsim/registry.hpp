#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "emsim/ensemble.hpp"

namespace emsim {

/// One camera frame, row-major uint16 counts.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> px;

    std::uint16_t at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }
    std::uint16_t& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + x]; }
};

/// Frames indexed by (channel k, voltage step) plus acquisition metadata.
struct FrameStack {
    int width = 0;
    int height = 0;
    double pixel_pitch_um = 0.2;
    std::vector<double> voltages; ///< strictly increasing, within [0, v_max]
    FrequencyGrid grid;
    std::uint64_t seed = 0;
    /// frames[k-1][step]
    std::vector<std::vector<Frame>> frames;

    void validate() const;
};

struct SynthesisParams {
    int width = 160;
    int height = 160;
    double pixel_pitch_um = 0.2;
    double psf_sigma_px = 1.5;
    double background_mean = 100.0; ///< counts per pixel, Poisson
    double amplitude = 200.0;       ///< peak counts per unit brightness on resonance
    int voltage_steps = 201;
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

/// A detected bright spot in one channel.
struct Spot {
    double x_px = 0.0;
    double y_px = 0.0;
    double brightness = 0.0; ///< peak pixel value
    int channel = 0;
    double best_voltage = 0.0;
};

struct LookupEntry {
    int emitter_id = 0;
    double x_um = 0.0;
    double y_um = 0.0;
    double best_voltage_v = 0.0;
    double brightness = 0.0;
};

/// The per-frequency-channel registry: which emitter sits where and which
/// bias voltage parks it on the channel.
struct LookupTable {
    int k_max = 0;
    std::map<int, std::vector<LookupEntry>> channels;
    int n_emitters = 0;

    int total_spots() const;
};

struct RegistryParams {
    double threshold_sigma = 5.0;    ///< detection gate above robust background
    double absolute_threshold = -1.0; ///< overrides the sigma rule when >= 0
    double min_separation_px = 4.0;
    double merge_radius_px = 1.0;    ///< same-emitter centroid distance
    double brightness_rel_diff_max = 0.5;
    int min_track_points = 2;        ///< voltage slices a spot must persist over
    int threads = 1;
};

struct EmitterStats {
    double n_spot = 0.0;
    double n_spot_prime = 0.0;   ///< n_spot / 2, spin-transition double counting
    double per_channel_avg = 0.0;
    double n_emitter = 0.0;      ///< per frequency channel per quantum channel
};

/// Renders the ensemble into a synthetic stack: per (channel, voltage) frame
/// each spin transition (f0 and f0 + splitting) contributes a Gaussian PSF
/// spot with peak amplitude * brightness * Lorentzian(f(V) - f_k; linewidth),
/// on a Poisson background. Slice noise streams derive from (seed, k, step),
/// so frames are reproducible and slices render in parallel.
FrameStack synthesize_frames(const std::vector<Emitter>& ensemble, const TuningLaw& law,
                             const FrequencyGrid& grid, const SynthesisParams& params);

/// Local maxima above `threshold`, non-maximum suppressed within
/// `min_separation_px`, centroided over the 3x3 neighborhood.
std::vector<Spot> detect_spots(const Frame& frame, double threshold, double min_separation_px);

/// Argmax of a (voltage, brightness) track; ties break toward lower voltage.
/// Throws no_signal_error on an all-zero track.
double best_voltage(const std::vector<std::pair<double, double>>& track);

/// Robust per-frame background estimate (median and MAD-based sigma), so
/// bright spots do not bias the detection threshold.
struct BackgroundEstimate {
    double mean = 0.0;
    double std_dev = 0.0;
};
BackgroundEstimate estimate_background(const Frame& frame);

/// Groups spots into emitter identities: spots merge when centroids are
/// within merge_radius_px and relative brightness difference
/// |b1-b2|/max(b1,b2) stays below the gate; merging is the transitive
/// closure of pairwise matches. Ids follow the lexicographic order of each
/// group's smallest (channel, x, y) member, so the result is independent of
/// input order.
LookupTable merge_identities(const std::vector<Spot>& spots, double pixel_pitch_um,
                             int k_max, const RegistryParams& params = {});

/// Full pipeline: per-slice detection, per-channel position tracks with a
/// persistence gate, best-voltage extraction, then cross-channel identity
/// merging.
LookupTable register_stack(const FrameStack& stack, const RegistryParams& params = {});

EmitterStats emitter_statistics(const LookupTable& table, int n_sys, int k_max);
EmitterStats emitter_statistics_from_counts(double n_spot, int n_sys, int k_max);

} // namespace emsim
