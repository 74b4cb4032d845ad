#include "emsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

#include "emsim/errors.hpp"

namespace emsim {

ConnectivityReport interval_components(const std::vector<Emitter>& ensemble,
                                       const TuningLaw& law) {
    if (ensemble.empty()) throw std::domain_error("interval_components: empty ensemble");

    const int n = static_cast<int>(ensemble.size());
    std::vector<Interval> iv(ensemble.size());
    for (int i = 0; i < n; ++i) iv[i] = tuning_interval(ensemble[i], law);

    std::vector<int> order(ensemble.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (iv[a].lo != iv[b].lo) return iv[a].lo < iv[b].lo;
        return a < b;
    });

    ConnectivityReport report;
    std::vector<int> current{ensemble[order[0]].id};
    double reach = iv[order[0]].hi;
    for (int idx = 1; idx < n; ++idx) {
        const int i = order[idx];
        if (iv[i].lo > reach) {
            report.components.push_back(std::move(current));
            current = {ensemble[i].id};
            reach = iv[i].hi;
        } else {
            current.push_back(ensemble[i].id);
            reach = std::max(reach, iv[i].hi);
        }
    }
    report.components.push_back(std::move(current));

    for (const auto& comp : report.components) {
        report.largest_size = std::max(report.largest_size, static_cast<int>(comp.size()));
        if (comp.size() >= 2) report.non_singleton_nodes += static_cast<int>(comp.size());
    }
    report.p_c = static_cast<double>(report.largest_size) / static_cast<double>(n);
    return report;
}

namespace {

double one_trial_pc(const EnsembleConfig& base, const TuningLaw& law, double ratio, int n_qubit,
                    std::uint64_t seed) {
    EnsembleConfig cfg = base;
    cfg.n_qubit = n_qubit;
    cfg.sigma_is_primary = false;
    cfg.mean_tuning_ghz = ratio * cfg.v_inh_ghz;
    cfg.rng_seed = seed;
    const auto ensemble = sample_ensemble(cfg);
    return interval_components(ensemble, law).p_c;
}

} // namespace

PcCurve pc_sweep(const EnsembleConfig& base_config, const TuningLaw& law,
                 const std::vector<double>& ratios, const std::vector<int>& n_qubit_list,
                 int trials, int threads) {
    base_config.validate();
    law.validate();
    if (trials < 1) throw config_error("pc_sweep: trials must be >= 1");
    for (double r : ratios)
        if (r < 0.0 || r > 1.0) throw config_error("pc_sweep: ratios must lie in [0, 1]");
    for (int n : n_qubit_list)
        if (n < 1) throw config_error("pc_sweep: n_qubit must be >= 1");

    PcCurve curve;
    curve.ratios = ratios;
    curve.n_qubits = n_qubit_list;
    curve.trials = trials;
    const std::size_t nr = ratios.size();
    const std::size_t ns = n_qubit_list.size();
    curve.p_c_mean.assign(nr, std::vector<double>(ns, 0.0));
    curve.p_c_stderr.assign(nr, std::vector<double>(ns, 0.0));

    struct Task {
        std::size_t ri, si;
        int trial;
    };
    std::vector<Task> tasks;
    tasks.reserve(nr * ns * static_cast<std::size_t>(trials));
    for (std::size_t ri = 0; ri < nr; ++ri)
        for (std::size_t si = 0; si < ns; ++si)
            for (int t = 0; t < trials; ++t) tasks.push_back({ri, si, t});

    std::vector<double> pc(tasks.size(), 0.0);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Task& t = tasks[i];
            const std::uint64_t seed =
                derive_seed(base_config.rng_seed,
                            {t.ri, t.si, static_cast<std::uint64_t>(t.trial)});
            pc[i] = one_trial_pc(base_config, law, ratios[t.ri], n_qubit_list[t.si], seed);
        }
    };

    if (threads <= 1 || tasks.size() < 2) {
        run_range(0, tasks.size());
    } else {
        const std::size_t nthreads = std::min<std::size_t>(threads, tasks.size());
        std::vector<std::future<void>> futs;
        const std::size_t chunk = (tasks.size() + nthreads - 1) / nthreads;
        for (std::size_t w = 0; w < nthreads; ++w) {
            const std::size_t b = w * chunk;
            const std::size_t e = std::min(tasks.size(), b + chunk);
            if (b >= e) break;
            futs.push_back(std::async(std::launch::async, run_range, b, e));
        }
        for (auto& f : futs) f.get();
    }

    // Reduce in index order; identical output for serial and parallel runs.
    for (std::size_t ri = 0; ri < nr; ++ri) {
        for (std::size_t si = 0; si < ns; ++si) {
            double sum = 0.0, sum2 = 0.0;
            for (int t = 0; t < trials; ++t) {
                const double v = pc[(ri * ns + si) * static_cast<std::size_t>(trials) +
                                    static_cast<std::size_t>(t)];
                sum += v;
                sum2 += v * v;
            }
            const double mean = sum / trials;
            curve.p_c_mean[ri][si] = mean;
            if (trials > 1) {
                const double var = std::max(0.0, (sum2 - trials * mean * mean) / (trials - 1));
                curve.p_c_stderr[ri][si] = std::sqrt(var / trials);
            }
        }
    }
    return curve;
}

ChannelGraph channel_graph(const std::vector<Emitter>& ensemble, const TuningLaw& law,
                           const FrequencyGrid& grid, double linewidth_limit_mhz) {
    grid.validate();
    law.validate();

    ChannelGraph g;
    g.members.assign(static_cast<std::size_t>(grid.k_max), {});
    int max_id = -1;
    for (const Emitter& e : ensemble) max_id = std::max(max_id, e.id);
    g.node_channels.assign(static_cast<std::size_t>(max_id + 1), {});

    std::vector<char> passes_gate(static_cast<std::size_t>(max_id + 1), 0);
    for (const Emitter& e : ensemble) {
        const auto channels = reachable_channels(e, law, grid);
        g.node_channels[static_cast<std::size_t>(e.id)] = channels;
        passes_gate[static_cast<std::size_t>(e.id)] = e.linewidth_mhz <= linewidth_limit_mhz;
        for (int k : channels) g.members[static_cast<std::size_t>(k - 1)].push_back(e.id);
    }

    // Membership is pure reachability; the linewidth gate applies to edges only.
    std::set<std::pair<int, int>> edge_set;
    for (const auto& channel_members : g.members) {
        for (std::size_t a = 0; a < channel_members.size(); ++a) {
            if (!passes_gate[static_cast<std::size_t>(channel_members[a])]) continue;
            for (std::size_t b = a + 1; b < channel_members.size(); ++b) {
                if (!passes_gate[static_cast<std::size_t>(channel_members[b])]) continue;
                const int i = std::min(channel_members[a], channel_members[b]);
                const int j = std::max(channel_members[a], channel_members[b]);
                edge_set.emplace(i, j);
            }
        }
    }
    g.edges.assign(edge_set.begin(), edge_set.end());
    return g;
}

ScalingEstimate scaling_estimate(double n_emitter, double n_sys, double p_c, double k_max) {
    if (n_emitter < 0.0 || n_sys < 0.0 || p_c < 0.0 || k_max < 0.0)
        throw std::domain_error("scaling_estimate: inputs must be >= 0");
    ScalingEstimate s;
    s.n_qubit = n_emitter * n_sys * p_c * k_max;
    s.n_link = std::min(n_emitter * n_sys * p_c, s.n_qubit);
    return s;
}

long long resolvable_spots(double fov_diameter_um, double spot_spacing_um) {
    if (fov_diameter_um <= 0.0 || spot_spacing_um <= 0.0)
        throw std::domain_error("resolvable_spots: inputs must be > 0");
    const double r = 0.5 * fov_diameter_um;
    return static_cast<long long>(
        std::floor(std::numbers::pi * r * r / (spot_spacing_um * spot_spacing_um)));
}

} // namespace emsim
