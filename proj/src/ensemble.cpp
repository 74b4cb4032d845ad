#include "emsim/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "emsim/errors.hpp"

namespace emsim {

void Emitter::validate() const {
    if (delta_vm_ghz < 0.0) throw config_error("emitter: delta_vm must be >= 0");
    if (linewidth_mhz <= 0.0) throw config_error("emitter: linewidth must be > 0");
    if (splitting_ghz < 0.0) throw config_error("emitter: splitting must be >= 0");
    if (brightness < 0.0) throw config_error("emitter: brightness must be >= 0");
}

void EmpiricalCdf::validate() const {
    if (points.size() < 2) throw config_error("empirical cdf needs at least 2 points");
    if (points.front().second != 0.0 || points.back().second != 1.0)
        throw config_error("empirical cdf must run from 0 to 1");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].first <= points[i - 1].first)
            throw config_error("empirical cdf values must be strictly increasing");
        if (points[i].second < points[i - 1].second)
            throw config_error("empirical cdf probabilities must be non-decreasing");
    }
}

double EmpiricalCdf::sample(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (u <= points[i].second) {
            const double p0 = points[i - 1].second;
            const double p1 = points[i].second;
            if (p1 == p0) return points[i].first;
            const double t = (u - p0) / (p1 - p0);
            return points[i - 1].first + t * (points[i].first - points[i - 1].first);
        }
    }
    return points.back().first;
}

EmpiricalCdf default_linewidth_cdf_mhz() {
    return EmpiricalCdf{{{30.0, 0.0}, {60.0, 0.20}, {200.0, 0.35}, {1000.0, 1.0}}};
}

EmpiricalCdf default_splitting_cdf_ghz() {
    return EmpiricalCdf{{{0.0, 0.0}, {0.6, 0.20}, {3.0, 1.0}}};
}

void EnsembleConfig::validate() const {
    if (n_qubit < 0) throw config_error("ensemble: n_qubit must be >= 0");
    if (v_inh_ghz <= 0.0) throw config_error("ensemble: v_inh must be > 0");
    if (sigma_is_primary) {
        if (tuning_sigma_ghz < 0.0) throw config_error("ensemble: tuning_sigma must be >= 0");
    } else {
        if (mean_tuning_ghz < 0.0) throw config_error("ensemble: mean_tuning must be >= 0");
    }
    if (fov_um <= 0.0) throw config_error("ensemble: fov must be > 0");
    if (min_separation_um < 0.0) throw config_error("ensemble: min_separation must be >= 0");
    if (brightness < 0.0) throw config_error("ensemble: brightness must be >= 0");
    linewidth_cdf_mhz.validate();
    splitting_cdf_ghz.validate();
}

double EnsembleConfig::effective_sigma_ghz() const {
    if (sigma_is_primary) return tuning_sigma_ghz;
    return mean_tuning_ghz * std::sqrt(std::numbers::pi / 2.0);
}

double EnsembleConfig::effective_mean_ghz() const {
    if (!sigma_is_primary) return mean_tuning_ghz;
    return tuning_sigma_ghz * std::sqrt(2.0 / std::numbers::pi);
}

void FrequencyGrid::validate() const {
    if (delta_v_ghz <= 0.0) throw config_error("grid: delta_v must be > 0");
    if (k_max < 1) throw config_error("grid: k_max must be >= 1");
}

double FrequencyGrid::channel_frequency(int k) const {
    return v0_ghz + static_cast<double>(k) * delta_v_ghz;
}

void TuningLaw::validate() const {
    if (v_max <= 0.0) throw config_error("law: v_max must be > 0");
    if (exponent <= 0.0) throw config_error("law: exponent must be > 0");
    if (direction != 1 && direction != -1) throw config_error("law: direction must be +1 or -1");
}

std::vector<Emitter> sample_ensemble(const EnsembleConfig& config) {
    config.validate();

    // Dedicated sub-streams per field keep the spectral draws identical when
    // only unrelated parts of the config change (stream indices are part of
    // the determinism contract, see header).
    Rng rng_pos = make_rng(derive_seed(config.rng_seed, {0}));
    Rng rng_f0 = make_rng(derive_seed(config.rng_seed, {1}));
    Rng rng_tune = make_rng(derive_seed(config.rng_seed, {2}));
    Rng rng_lw = make_rng(derive_seed(config.rng_seed, {3}));
    Rng rng_split = make_rng(derive_seed(config.rng_seed, {4}));
    StandardNormal normal;

    const double sigma = config.effective_sigma_ghz();

    std::vector<Emitter> out;
    out.reserve(static_cast<std::size_t>(config.n_qubit));
    for (int i = 0; i < config.n_qubit; ++i) {
        Emitter e;
        e.id = i;

        double x = uniform(rng_pos, 0.0, config.fov_um);
        double y = uniform(rng_pos, 0.0, config.fov_um);
        if (config.min_separation_um > 0.0) {
            const double min_sep2 = config.min_separation_um * config.min_separation_um;
            int attempts = 0;
            auto too_close = [&](double px, double py) {
                for (const Emitter& prev : out) {
                    const double dx = prev.x_um - px;
                    const double dy = prev.y_um - py;
                    if (dx * dx + dy * dy < min_sep2) return true;
                }
                return false;
            };
            while (too_close(x, y)) {
                if (++attempts > 10000)
                    throw config_error("ensemble: cannot place " + std::to_string(config.n_qubit) +
                                       " emitters at min separation " +
                                       std::to_string(config.min_separation_um) + " um");
                x = uniform(rng_pos, 0.0, config.fov_um);
                y = uniform(rng_pos, 0.0, config.fov_um);
            }
        }
        e.x_um = x;
        e.y_um = y;

        e.f0_ghz = uniform(rng_f0, 0.0, config.v_inh_ghz);
        e.delta_vm_ghz = sigma * std::abs(normal(rng_tune));
        if (config.interval_mode == IntervalMode::Symmetric)
            e.f0_ghz -= 0.5 * e.delta_vm_ghz; // center the interval on the sampled frequency
        e.linewidth_mhz = config.linewidth_cdf_mhz.sample(uniform01(rng_lw));
        e.splitting_ghz = config.splitting_cdf_ghz.sample(uniform01(rng_split));
        e.brightness = config.brightness;
        out.push_back(e);
    }
    return out;
}

double frequency_at_voltage(const Emitter& e, const TuningLaw& law, double v) {
    law.validate();
    if (v < 0.0 || v > law.v_max)
        throw std::domain_error("frequency_at_voltage: voltage outside [0, v_max]");
    const double frac = std::pow(v / law.v_max, law.exponent);
    return e.f0_ghz + static_cast<double>(law.direction) * e.delta_vm_ghz * frac;
}

Interval tuning_interval(const Emitter& e, const TuningLaw& law) {
    if (law.direction > 0) return {e.f0_ghz, e.f0_ghz + e.delta_vm_ghz};
    return {e.f0_ghz - e.delta_vm_ghz, e.f0_ghz};
}

double voltage_for_frequency(const Emitter& e, const TuningLaw& law, double f_target) {
    law.validate();
    const Interval range = tuning_interval(e, law);
    if (!range.contains(f_target))
        throw unreachable_error("voltage_for_frequency: target " + std::to_string(f_target) +
                                " GHz outside tuning interval [" + std::to_string(range.lo) +
                                ", " + std::to_string(range.hi) + "]");

    // Exact endpoints first so the inverse is bit-clean there.
    if (f_target == e.f0_ghz) return 0.0;
    const double f_end = e.f0_ghz + static_cast<double>(law.direction) * e.delta_vm_ghz;
    if (f_target == f_end) return law.v_max;

    double lo = 0.0, hi = law.v_max;
    // f is monotone toward f_end as v grows, regardless of direction sign.
    const double sign = static_cast<double>(law.direction);
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = frequency_at_voltage(e, law, mid);
        if (std::abs(f_mid - f_target) < kBisectionTolGhz) return mid;
        if (sign * (f_mid - f_target) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<int> reachable_channels(const Emitter& e, const TuningLaw& law,
                                    const FrequencyGrid& grid) {
    grid.validate();
    const Interval range = tuning_interval(e, law);
    // Closed-interval containment; touching a channel frequency counts.
    const double k_lo_f = (range.lo - grid.v0_ghz) / grid.delta_v_ghz;
    const double k_hi_f = (range.hi - grid.v0_ghz) / grid.delta_v_ghz;
    int k_lo = static_cast<int>(std::ceil(k_lo_f - 1e-12));
    int k_hi = static_cast<int>(std::floor(k_hi_f + 1e-12));
    k_lo = std::max(k_lo, 1);
    k_hi = std::min(k_hi, grid.k_max);

    std::vector<int> out;
    for (int k = k_lo; k <= k_hi; ++k)
        if (range.contains(grid.channel_frequency(k))) out.push_back(k);
    return out;
}

} // namespace emsim
