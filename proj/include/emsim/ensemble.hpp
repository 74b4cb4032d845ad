#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "emsim/rng.hpp"

namespace emsim {

/// One quantum emitter's spectral identity. Frequencies are offsets in GHz
/// relative to the channel-grid origin; positions are micrometers inside the
/// field of view.
struct Emitter {
    int id = 0;
    double x_um = 0.0;
    double y_um = 0.0;
    double f0_ghz = 0.0;       ///< zero-bias ZPL frequency offset
    double delta_vm_ghz = 0.0; ///< maximum spectral tuning range
    double linewidth_mhz = 0.0;
    double splitting_ghz = 0.0; ///< spin-transition splitting under magnetic bias
    double brightness = 1.0;    ///< relative peak count rate

    void validate() const;
};

/// Piecewise-linear CDF over a scalar; sampled by inverse transform.
/// Points are (value, cumulative probability), both strictly increasing,
/// with cdf running from 0 to 1.
struct EmpiricalCdf {
    std::vector<std::pair<double, double>> points;

    void validate() const;
    double sample(double u) const;
};

/// Linewidth distribution anchored at the measured quantiles:
/// 20% of emitters at or below 60 MHz, 35% at or below 200 MHz,
/// linear tail up to a 1 GHz cap, floor at the 30 MHz transform limit.
EmpiricalCdf default_linewidth_cdf_mhz();

/// Spin-splitting distribution: 80% of splittings above 0.6 GHz,
/// linear tail up to a 3 GHz cap.
EmpiricalCdf default_splitting_cdf_ghz();

/// Whether the tuning interval extends one-sided from f0 or symmetrically
/// around the sampled frequency.
enum class IntervalMode { OneSided, Symmetric };

struct EnsembleConfig {
    int n_qubit = 0;
    double v_inh_ghz = 20.0; ///< inhomogeneous range

    /// Tuning-range magnitude is |N(0, sigma)|. Exactly one of mean/sigma is
    /// primary; the other follows from E|N(0,sigma)| = sigma*sqrt(2/pi).
    double mean_tuning_ghz = 2.0;
    double tuning_sigma_ghz = 0.0;
    bool sigma_is_primary = false;

    EmpiricalCdf linewidth_cdf_mhz = default_linewidth_cdf_mhz();
    EmpiricalCdf splitting_cdf_ghz = default_splitting_cdf_ghz();

    double fov_um = 40.0;           ///< square field of view side
    double min_separation_um = 0.0; ///< optional spatial exclusion radius
    double brightness = 1.0;
    IntervalMode interval_mode = IntervalMode::OneSided;

    std::uint64_t rng_seed = 0;

    void validate() const;
    double effective_sigma_ghz() const;
    double effective_mean_ghz() const;
};

/// Uniform channel comb: channel k sits at v0 + k*delta_v for k = 1..k_max.
struct FrequencyGrid {
    double v0_ghz = 0.0;
    double delta_v_ghz = 2.0;
    int k_max = 11;

    void validate() const;
    double channel_frequency(int k) const;
};

/// Voltage -> ZPL-frequency law: f(V) = f0 + direction * delta_vm * (V/v_max)^exponent.
/// Monotone on [0, v_max] with f(0) = f0 and f(v_max) = f0 + direction*delta_vm.
struct TuningLaw {
    double v_max = 40.0;
    double exponent = 2.0;
    int direction = +1;

    void validate() const;
};

/// Closed tuning interval [lo, hi] in GHz (direction-ordered).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double f) const { return lo <= f && f <= hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Draws n_qubit emitters. Zero-bias frequencies are uniform over
/// [0, v_inh]; tuning ranges are half-normal. Field streams (position,
/// frequency, tuning, linewidth, splitting) are derived from rng_seed by
/// fixed sub-stream indices 0..4, so identical seeds reproduce ensembles
/// bit-for-bit and coupled seeds keep per-emitter draws aligned across
/// config changes.
std::vector<Emitter> sample_ensemble(const EnsembleConfig& config);

double frequency_at_voltage(const Emitter& e, const TuningLaw& law, double v);

/// Inverse of frequency_at_voltage by monotone bisection to |df| < 1e-6 GHz.
/// Throws unreachable_error when f_target lies outside the tuning interval.
double voltage_for_frequency(const Emitter& e, const TuningLaw& law, double f_target);

Interval tuning_interval(const Emitter& e, const TuningLaw& law);

/// Channel indices k whose comb frequency falls inside the tuning interval.
std::vector<int> reachable_channels(const Emitter& e, const TuningLaw& law,
                                    const FrequencyGrid& grid);

constexpr double kBisectionTolGhz = 1e-6;

} // namespace emsim
