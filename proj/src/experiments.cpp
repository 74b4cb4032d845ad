#include "emsim/experiments.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <json.hpp>

#include "emsim/errors.hpp"
#include "emsim/graph.hpp"
#include "emsim/io.hpp"

namespace emsim {

namespace {

std::filesystem::path prepare_out_dir(const RunConfig& config) {
    std::filesystem::path dir(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory: " + dir.string());
    save_resolved_config(dir / "resolved_config.json", config);
    return dir;
}

} // namespace

void run_pc_sweep(const RunConfig& config) {
    const auto dir = prepare_out_dir(config);
    const PcCurve curve = pc_sweep(config.ensemble, config.law, config.pc_ratios,
                                   config.pc_n_qubits, config.pc_trials, config.threads);
    save_pc_curve_csv(dir / "pc_curve.csv", curve);
}

void run_registry(const RunConfig& config) {
    const auto dir = prepare_out_dir(config);

    FrameStack stack;
    if (!config.frames_dir.empty()) {
        stack = load_stack(config.frames_dir);
    } else {
        const auto ensemble = sample_ensemble(config.ensemble);
        stack = synthesize_frames(ensemble, config.law, config.grid, config.synth);
    }

    const LookupTable table = register_stack(stack, config.registry);
    save_lookup_json(dir / "lookup_table.json", table);
    save_lookup_csv(dir / "lookup_table.csv", table);
    save_stats_csv(dir / "stats.csv", emitter_statistics(table, config.n_sys, config.grid.k_max));
}

void run_spam(const RunConfig& config) {
    const auto dir = prepare_out_dir(config);

    std::vector<ReadoutRecord> records;
    if (!config.records_csv.empty()) {
        records = load_records_csv(config.records_csv);
    } else {
        records = simulate_readout(config.spam);
        save_records_csv(dir / "records.csv", records);
    }

    const auto sweep = post_selection_sweep(records, config.c_th_list);
    save_spam_sweep_csv(dir / "spam_sweep.csv", sweep);

    // Bins 1 and 3 carry the bright/dark mixture; the crossover threshold
    // comes from the unconditioned bin-1 fit.
    auto histogram_of = [&](auto&& bin_of) {
        int max_count = 0;
        for (const ReadoutRecord& r : records) max_count = std::max(max_count, bin_of(r));
        std::vector<long long> h(static_cast<std::size_t>(max_count) + 1, 0);
        for (const ReadoutRecord& r : records) ++h[static_cast<std::size_t>(bin_of(r))];
        return h;
    };
    const MixtureFit fit1 = fit_mixture(histogram_of([](const ReadoutRecord& r) { return r.bin1; }));
    const MixtureFit fit3 = fit_mixture(histogram_of([](const ReadoutRecord& r) { return r.bin3; }));
    save_fit_report_json(dir / "fit_report.json", fit1, fit3, solve_threshold(fit1));
}

std::string run_budget(const RunConfig& config) {
    const auto dir = prepare_out_dir(config);
    const double purcell = purcell_from_lifetimes(config.lifetimes);
    const DetectionReport det = detection_probability(config.budget);
    save_budget_json(dir / "budget.json", config.lifetimes, config.budget, purcell, det);
    return budget_table_text(config.lifetimes, config.budget, purcell, det);
}

void run_scaling(const RunConfig& config) {
    const auto dir = prepare_out_dir(config);

    std::vector<std::tuple<double, double, std::string>> rows;
    for (const ScalingPoint& p : config.scaling_points) {
        const ScalingEstimate est = scaling_estimate(p.n_emitter, p.n_sys, p.p_c, p.k_max);
        rows.emplace_back(est.n_qubit, est.n_link, p.label);
    }
    save_scaling_csv(dir / "scaling.csv", rows);

    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["resolvable_spots"] = resolvable_spots(config.fov_diameter_um, config.spot_spacing_um);
    j["fov_diameter_um"] = config.fov_diameter_um;
    j["spot_spacing_um"] = config.spot_spacing_um;
    std::ofstream out(dir / "scaling.json");
    if (!out) throw io_error("cannot open for writing: " + (dir / "scaling.json").string());
    out << j.dump(2) << "\n";
}

void run_synth_frames(const RunConfig& config) {
    const auto dir = prepare_out_dir(config);
    const auto ensemble = sample_ensemble(config.ensemble);
    const FrameStack stack = synthesize_frames(ensemble, config.law, config.grid, config.synth);
    save_stack(dir / "frames", stack);
    save_ensemble_json(dir / "ensemble.json", config.ensemble, ensemble);
    save_ensemble_csv(dir / "ensemble.csv", ensemble);
}

} // namespace emsim
