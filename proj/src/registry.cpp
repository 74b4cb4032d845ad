#include "emsim/registry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <stdexcept>

#include "emsim/errors.hpp"
#include "emsim/rng.hpp"

namespace emsim {

void FrameStack::validate() const {
    if (width <= 0 || height <= 0) throw config_error("frame stack: bad dimensions");
    if (pixel_pitch_um <= 0.0) throw config_error("frame stack: pixel pitch must be > 0");
    if (voltages.size() < 2) throw config_error("frame stack: need >= 2 voltage steps");
    for (std::size_t i = 1; i < voltages.size(); ++i)
        if (voltages[i] <= voltages[i - 1])
            throw config_error("frame stack: voltages must be strictly increasing");
    grid.validate();
    if (static_cast<int>(frames.size()) != grid.k_max)
        throw config_error("frame stack: channel count mismatch");
    for (const auto& channel : frames) {
        if (channel.size() != voltages.size())
            throw config_error("frame stack: voltage step count mismatch");
        for (const Frame& f : channel)
            if (f.width != width || f.height != height ||
                f.px.size() != static_cast<std::size_t>(width) * height)
                throw config_error("frame stack: frame dimension mismatch");
    }
}

void SynthesisParams::validate() const {
    if (width <= 0 || height <= 0) throw config_error("synthesis: bad frame dimensions");
    if (pixel_pitch_um <= 0.0) throw config_error("synthesis: pixel pitch must be > 0");
    if (psf_sigma_px <= 0.0) throw config_error("synthesis: psf sigma must be > 0");
    if (background_mean < 0.0) throw config_error("synthesis: background must be >= 0");
    if (amplitude < 0.0) throw config_error("synthesis: amplitude must be >= 0");
    if (voltage_steps < 2) throw config_error("synthesis: need >= 2 voltage steps");
}

int LookupTable::total_spots() const {
    int n = 0;
    for (const auto& [k, entries] : channels) n += static_cast<int>(entries.size());
    return n;
}

namespace {

/// Exact inverse-CDF sampler for a fixed Poisson mean; used for the flat
/// background where the same mean applies to almost every pixel.
class PoissonTable {
  public:
    explicit PoissonTable(double lambda) {
        if (lambda <= 0.0) {
            cdf_.push_back(1.0);
            return;
        }
        double p = std::exp(-lambda);
        double cum = p;
        cdf_.push_back(cum);
        for (int n = 1; cum < 1.0 - 1e-15 && n < 1 << 20; ++n) {
            p *= lambda / n;
            cum += p;
            cdf_.push_back(cum);
        }
    }

    int sample(Rng& rng) const {
        const double u = uniform01(rng);
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<int>(it == cdf_.end() ? cdf_.size() - 1 : it - cdf_.begin());
    }

  private:
    std::vector<double> cdf_;
};

double lorentzian_peak1(double detuning_ghz, double fwhm_ghz) {
    const double x = 2.0 * detuning_ghz / fwhm_ghz;
    return 1.0 / (1.0 + x * x);
}

std::uint16_t clamp_u16(double v) {
    return static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
}

void render_slice(Frame& frame, const std::vector<Emitter>& ensemble, const TuningLaw& law,
                  double channel_freq, double voltage, const SynthesisParams& params,
                  const PoissonTable& background, Rng& rng) {
    const int w = params.width, h = params.height;
    frame.width = w;
    frame.height = h;
    frame.px.assign(static_cast<std::size_t>(w) * h, 0);

    std::vector<float> signal(static_cast<std::size_t>(w) * h, 0.0f);
    const int stamp_r = static_cast<int>(std::ceil(4.0 * params.psf_sigma_px));
    const double inv_2s2 = 1.0 / (2.0 * params.psf_sigma_px * params.psf_sigma_px);
    constexpr double kContributionCutoff = 0.05; // counts; below camera noise floor

    for (const Emitter& e : ensemble) {
        const double fwhm_ghz = e.linewidth_mhz * 1e-3;
        const double base = frequency_at_voltage(e, law, voltage);
        for (int transition = 0; transition < 2; ++transition) {
            const double f = base + (transition == 0 ? 0.0 : e.splitting_ghz);
            const double peak =
                params.amplitude * e.brightness * lorentzian_peak1(f - channel_freq, fwhm_ghz);
            if (peak < kContributionCutoff) continue;
            const double cx = e.x_um / params.pixel_pitch_um;
            const double cy = e.y_um / params.pixel_pitch_um;
            const int x0 = std::max(0, static_cast<int>(std::floor(cx)) - stamp_r);
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(cx)) + stamp_r);
            const int y0 = std::max(0, static_cast<int>(std::floor(cy)) - stamp_r);
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(cy)) + stamp_r);
            for (int y = y0; y <= y1; ++y) {
                const double dy = y - cy;
                for (int x = x0; x <= x1; ++x) {
                    const double dx = x - cx;
                    signal[static_cast<std::size_t>(y) * w + x] +=
                        static_cast<float>(peak * std::exp(-(dx * dx + dy * dy) * inv_2s2));
                }
            }
        }
    }

    for (std::size_t i = 0; i < signal.size(); ++i) {
        if (signal[i] == 0.0f) {
            frame.px[i] = clamp_u16(background.sample(rng));
        } else {
            std::poisson_distribution<int> dist(params.background_mean + signal[i]);
            frame.px[i] = clamp_u16(dist(rng));
        }
    }
}

} // namespace

FrameStack synthesize_frames(const std::vector<Emitter>& ensemble, const TuningLaw& law,
                             const FrequencyGrid& grid, const SynthesisParams& params) {
    params.validate();
    grid.validate();
    law.validate();

    FrameStack stack;
    stack.width = params.width;
    stack.height = params.height;
    stack.pixel_pitch_um = params.pixel_pitch_um;
    stack.grid = grid;
    stack.seed = params.seed;
    stack.voltages.resize(static_cast<std::size_t>(params.voltage_steps));
    for (int s = 0; s < params.voltage_steps; ++s)
        stack.voltages[s] = law.v_max * s / (params.voltage_steps - 1);
    stack.frames.assign(static_cast<std::size_t>(grid.k_max),
                        std::vector<Frame>(stack.voltages.size()));

    const PoissonTable background(params.background_mean);

    struct Slice {
        int k, step;
    };
    std::vector<Slice> slices;
    slices.reserve(static_cast<std::size_t>(grid.k_max) * stack.voltages.size());
    for (int k = 1; k <= grid.k_max; ++k)
        for (int s = 0; s < static_cast<int>(stack.voltages.size()); ++s)
            slices.push_back({k, s});

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto [k, step] = slices[i];
            Rng rng = make_rng(derive_seed(params.seed,
                                           {0xf7a3e, static_cast<std::uint64_t>(k),
                                            static_cast<std::uint64_t>(step)}));
            render_slice(stack.frames[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(step)],
                         ensemble, law, grid.channel_frequency(k), stack.voltages[step], params,
                         background, rng);
        }
    };

    if (params.threads <= 1) {
        run_range(0, slices.size());
    } else {
        const std::size_t nthreads = std::min<std::size_t>(params.threads, slices.size());
        const std::size_t chunk = (slices.size() + nthreads - 1) / nthreads;
        std::vector<std::future<void>> futs;
        for (std::size_t t = 0; t < nthreads; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(slices.size(), b + chunk);
            if (b >= e) break;
            futs.push_back(std::async(std::launch::async, run_range, b, e));
        }
        for (auto& f : futs) f.get();
    }
    return stack;
}

BackgroundEstimate estimate_background(const Frame& frame) {
    // Median and MAD through a count histogram; the walk stops near the
    // background level so cost stays O(pixels).
    std::vector<std::uint32_t> hist(65536, 0);
    int max_v = 0;
    for (std::uint16_t v : frame.px) {
        ++hist[v];
        max_v = std::max<int>(max_v, v);
    }
    const std::size_t n = frame.px.size();
    auto hist_quantile = [&](double q) {
        const double target = q * static_cast<double>(n);
        double cum = 0.0;
        for (int v = 0; v <= max_v; ++v) {
            cum += hist[v];
            if (cum >= target) return v;
        }
        return max_v;
    };
    const int median = hist_quantile(0.5);

    std::vector<std::uint32_t> dev_hist(static_cast<std::size_t>(max_v) + 2, 0);
    for (std::uint16_t v : frame.px) ++dev_hist[static_cast<std::size_t>(std::abs(v - median))];
    double cum = 0.0;
    int mad = 0;
    for (int d = 0; d <= max_v + 1; ++d) {
        cum += dev_hist[static_cast<std::size_t>(d)];
        if (cum >= 0.5 * static_cast<double>(n)) {
            mad = d;
            break;
        }
    }

    BackgroundEstimate est;
    est.mean = static_cast<double>(median);
    est.std_dev = std::max(1.4826 * static_cast<double>(mad), 1.0);
    return est;
}

std::vector<Spot> detect_spots(const Frame& frame, double threshold, double min_separation_px) {
    if (threshold <= 0.0) throw std::invalid_argument("detect_spots: threshold must be > 0");
    const int w = frame.width, h = frame.height;

    struct Candidate {
        int x, y;
        double value;
    };
    std::vector<Candidate> candidates;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double v = frame.at(x, y);
            if (v < threshold) continue;
            // Strictly greater than earlier-scan neighbors, >= later ones:
            // exactly one detection per flat plateau.
            bool is_max = v > frame.at(x - 1, y) && v > frame.at(x - 1, y - 1) &&
                          v > frame.at(x, y - 1) && v > frame.at(x + 1, y - 1) &&
                          v >= frame.at(x + 1, y) && v >= frame.at(x - 1, y + 1) &&
                          v >= frame.at(x, y + 1) && v >= frame.at(x + 1, y + 1);
            if (is_max) candidates.push_back({x, y, v});
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });

    const double min_sep2 = min_separation_px * min_separation_px;
    std::vector<Spot> spots;
    for (const Candidate& c : candidates) {
        bool suppressed = false;
        for (const Spot& kept : spots) {
            const double dx = kept.x_px - c.x;
            const double dy = kept.y_px - c.y;
            if (dx * dx + dy * dy < min_sep2) {
                suppressed = true;
                break;
            }
        }
        if (suppressed) continue;

        double sum = 0.0, sx = 0.0, sy = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const double v = frame.at(c.x + dx, c.y + dy);
                sum += v;
                sx += v * (c.x + dx);
                sy += v * (c.y + dy);
            }
        Spot s;
        s.x_px = sx / sum;
        s.y_px = sy / sum;
        s.brightness = c.value;
        spots.push_back(s);
    }
    return spots;
}

double best_voltage(const std::vector<std::pair<double, double>>& track) {
    if (track.size() < 2) throw std::invalid_argument("best_voltage: need >= 2 samples");
    auto sorted = track;
    std::sort(sorted.begin(), sorted.end());
    double best_v = sorted.front().first;
    double best_b = sorted.front().second;
    bool any_signal = best_b > 0.0;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].second > 0.0) any_signal = true;
        if (sorted[i].second > best_b) { // strict: ties keep the lower voltage
            best_b = sorted[i].second;
            best_v = sorted[i].first;
        }
    }
    if (!any_signal) throw no_signal_error("best_voltage: all-zero track");
    return best_v;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

LookupTable merge_identities(const std::vector<Spot>& spots, double pixel_pitch_um, int k_max,
                             const RegistryParams& params) {
    LookupTable table;
    table.k_max = k_max;
    if (spots.empty()) return table;

    const double r2 = params.merge_radius_px * params.merge_radius_px;
    UnionFind uf(spots.size());
    for (std::size_t i = 0; i < spots.size(); ++i) {
        for (std::size_t j = i + 1; j < spots.size(); ++j) {
            const double dx = spots[i].x_px - spots[j].x_px;
            const double dy = spots[i].y_px - spots[j].y_px;
            if (dx * dx + dy * dy >= r2) continue;
            const double hi = std::max(spots[i].brightness, spots[j].brightness);
            const double rel = hi > 0.0 ? std::abs(spots[i].brightness - spots[j].brightness) / hi
                                        : 0.0;
            if (rel < params.brightness_rel_diff_max) uf.unite(static_cast<int>(i), static_cast<int>(j));
        }
    }

    // Deterministic ids: groups ordered by their lexicographically smallest
    // (channel, x, y) member.
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < spots.size(); ++i)
        groups[uf.find(static_cast<int>(i))].push_back(i);

    struct Key {
        int channel;
        double x, y;
        int root;
    };
    std::vector<Key> keys;
    keys.reserve(groups.size());
    for (const auto& [root, members] : groups) {
        Key key{0, 0.0, 0.0, root};
        bool first = true;
        for (std::size_t i : members) {
            const Spot& s = spots[i];
            if (first || s.channel < key.channel ||
                (s.channel == key.channel &&
                 (s.x_px < key.x || (s.x_px == key.x && s.y_px < key.y)))) {
                key = {s.channel, s.x_px, s.y_px, root};
                first = false;
            }
        }
        keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.channel != b.channel) return a.channel < b.channel;
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.root < b.root;
    });

    table.n_emitters = static_cast<int>(keys.size());
    for (std::size_t id = 0; id < keys.size(); ++id) {
        const auto& members = groups[keys[id].root];
        // One entry per (channel, emitter): keep the brightest spot there.
        std::map<int, const Spot*> per_channel;
        for (std::size_t i : members) {
            const Spot& s = spots[i];
            auto [it, inserted] = per_channel.try_emplace(s.channel, &s);
            if (!inserted && s.brightness > it->second->brightness) it->second = &s;
        }
        for (const auto& [channel, s] : per_channel) {
            LookupEntry entry;
            entry.emitter_id = static_cast<int>(id);
            entry.x_um = s->x_px * pixel_pitch_um;
            entry.y_um = s->y_px * pixel_pitch_um;
            entry.best_voltage_v = s->best_voltage;
            entry.brightness = s->brightness;
            table.channels[channel].push_back(entry);
        }
    }
    return table;
}

LookupTable register_stack(const FrameStack& stack, const RegistryParams& params) {
    stack.validate();

    struct Detection {
        int step;
        Spot spot;
    };

    std::vector<Spot> channel_spots;
    const int n_channels = stack.grid.k_max;
    std::vector<std::vector<Detection>> per_channel(static_cast<std::size_t>(n_channels));

    auto detect_channel = [&](int k) {
        std::vector<Detection>& dets = per_channel[static_cast<std::size_t>(k - 1)];
        for (int step = 0; step < static_cast<int>(stack.voltages.size()); ++step) {
            const Frame& frame =
                stack.frames[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(step)];
            double threshold = params.absolute_threshold;
            if (threshold < 0.0) {
                const BackgroundEstimate bg = estimate_background(frame);
                threshold = bg.mean + params.threshold_sigma * bg.std_dev;
            }
            for (Spot& s : detect_spots(frame, threshold, params.min_separation_px)) {
                s.channel = k;
                dets.push_back({step, s});
            }
        }
    };

    if (params.threads <= 1 || n_channels < 2) {
        for (int k = 1; k <= n_channels; ++k) detect_channel(k);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<int> next{1};
        const int nthreads = std::min(params.threads, n_channels);
        for (int t = 0; t < nthreads; ++t)
            futs.push_back(std::async(std::launch::async, [&]() {
                for (int k = next.fetch_add(1); k <= n_channels; k = next.fetch_add(1))
                    detect_channel(k);
            }));
        for (auto& f : futs) f.get();
    }

    for (int k = 1; k <= n_channels; ++k) {
        const auto& dets = per_channel[static_cast<std::size_t>(k - 1)];
        if (dets.empty()) continue;

        // A stationary emitter shows up at the same centroid across voltage
        // slices; group by position within the channel.
        UnionFind uf(dets.size());
        const double r2 = params.merge_radius_px * params.merge_radius_px;
        for (std::size_t i = 0; i < dets.size(); ++i)
            for (std::size_t j = i + 1; j < dets.size(); ++j) {
                const double dx = dets[i].spot.x_px - dets[j].spot.x_px;
                const double dy = dets[i].spot.y_px - dets[j].spot.y_px;
                if (dx * dx + dy * dy < r2) uf.unite(static_cast<int>(i), static_cast<int>(j));
            }

        std::map<int, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < dets.size(); ++i)
            groups[uf.find(static_cast<int>(i))].push_back(i);

        for (const auto& [root, members] : groups) {
            // Brightness per voltage step (max when a step saw several hits).
            std::map<int, double> by_step;
            for (std::size_t i : members) {
                auto [it, inserted] = by_step.try_emplace(dets[i].step, dets[i].spot.brightness);
                if (!inserted) it->second = std::max(it->second, dets[i].spot.brightness);
            }
            if (static_cast<int>(by_step.size()) < params.min_track_points)
                continue; // single-slice flickers are noise, not emitters

            std::vector<std::pair<double, double>> track;
            track.reserve(by_step.size());
            for (const auto& [step, b] : by_step)
                track.emplace_back(stack.voltages[static_cast<std::size_t>(step)], b);
            const double v_best =
                track.size() >= 2 ? best_voltage(track) : track.front().first;

            Spot s;
            double wsum = 0.0;
            for (std::size_t i : members) {
                const double w = dets[i].spot.brightness;
                s.x_px += w * dets[i].spot.x_px;
                s.y_px += w * dets[i].spot.y_px;
                s.brightness = std::max(s.brightness, dets[i].spot.brightness);
                wsum += w;
            }
            s.x_px /= wsum;
            s.y_px /= wsum;
            s.channel = k;
            s.best_voltage = v_best;
            channel_spots.push_back(s);
        }
    }

    return merge_identities(channel_spots, stack.pixel_pitch_um, stack.grid.k_max, params);
}

EmitterStats emitter_statistics(const LookupTable& table, int n_sys, int k_max) {
    return emitter_statistics_from_counts(static_cast<double>(table.total_spots()), n_sys, k_max);
}

EmitterStats emitter_statistics_from_counts(double n_spot, int n_sys, int k_max) {
    if (n_sys < 1 || k_max < 1)
        throw std::invalid_argument("emitter_statistics: n_sys and k_max must be >= 1");
    EmitterStats stats;
    stats.n_spot = n_spot;
    stats.n_spot_prime = n_spot / 2.0;
    stats.per_channel_avg = stats.n_spot_prime / static_cast<double>(k_max);
    stats.n_emitter = stats.n_spot_prime / (static_cast<double>(k_max) * n_sys);
    return stats;
}

} // namespace emsim
