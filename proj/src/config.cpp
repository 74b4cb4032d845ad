#include "emsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "emsim/errors.hpp"
#include "json_detail.hpp"

namespace emsim {

using detail::ordered_json;

RunConfig::RunConfig() {
    // 20 log-spaced tunability ratios spanning the percolation thresholds of
    // the default system sizes.
    pc_ratios.reserve(20);
    for (int i = 0; i < 20; ++i)
        pc_ratios.push_back(std::pow(10.0, -3.0 + (i / 19.0) * (std::log10(0.2) + 3.0)));

    for (std::size_t i = 0; i <= 30; ++i) c_th_list.push_back(static_cast<double>(i));

    scaling_points = {{"chip_k1", 2.3, 1024.0, 1.0, 1.0}, {"chip_k11", 2.3, 1024.0, 1.0, 11.0}};
}

void RunConfig::validate() const {
    ensemble.validate();
    grid.validate();
    law.validate();
    synth.validate();
    spam.validate();
    lifetimes.validate();
    budget.validate();
    if (threads < 1) throw config_error("threads must be >= 1");
    if (pc_trials < 1) throw config_error("pc_sweep.trials must be >= 1");
    if (n_sys < 1) throw config_error("registry.n_sys must be >= 1");
    if (fov_diameter_um <= 0.0 || spot_spacing_um <= 0.0)
        throw config_error("scaling: fov_diameter and spot_spacing must be > 0");
}

namespace {

void check_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw config_error("unknown config key '" + context + key + "'");
}

template <typename T>
void get_if(const ordered_json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void parse_ensemble(const ordered_json& j, EnsembleConfig& c) {
    check_keys(j,
               {"n_qubit", "v_inh_ghz", "mean_tuning_ghz", "tuning_sigma_ghz", "interval_mode",
                "fov_um", "min_separation_um", "brightness", "linewidth_cdf_mhz",
                "splitting_cdf_ghz"},
               "ensemble.");
    if (j.contains("mean_tuning_ghz") && j.contains("tuning_sigma_ghz"))
        throw config_error("ensemble: give mean_tuning_ghz or tuning_sigma_ghz, not both");
    get_if(j, "n_qubit", c.n_qubit);
    get_if(j, "v_inh_ghz", c.v_inh_ghz);
    if (j.contains("tuning_sigma_ghz")) {
        c.sigma_is_primary = true;
        c.tuning_sigma_ghz = j.at("tuning_sigma_ghz").get<double>();
    } else if (j.contains("mean_tuning_ghz")) {
        c.sigma_is_primary = false;
        c.mean_tuning_ghz = j.at("mean_tuning_ghz").get<double>();
    }
    if (j.contains("interval_mode")) {
        const std::string mode = j.at("interval_mode").get<std::string>();
        if (mode == "one_sided")
            c.interval_mode = IntervalMode::OneSided;
        else if (mode == "symmetric")
            c.interval_mode = IntervalMode::Symmetric;
        else
            throw config_error("ensemble.interval_mode must be one_sided or symmetric");
    }
    get_if(j, "fov_um", c.fov_um);
    get_if(j, "min_separation_um", c.min_separation_um);
    get_if(j, "brightness", c.brightness);
    if (j.contains("linewidth_cdf_mhz")) c.linewidth_cdf_mhz = detail::cdf_from_json(j.at("linewidth_cdf_mhz"));
    if (j.contains("splitting_cdf_ghz")) c.splitting_cdf_ghz = detail::cdf_from_json(j.at("splitting_cdf_ghz"));
}

void parse_grid(const ordered_json& j, FrequencyGrid& g) {
    check_keys(j, {"v0_ghz", "delta_v_ghz", "k_max"}, "grid.");
    get_if(j, "v0_ghz", g.v0_ghz);
    get_if(j, "delta_v_ghz", g.delta_v_ghz);
    get_if(j, "k_max", g.k_max);
}

void parse_law(const ordered_json& j, TuningLaw& l) {
    check_keys(j, {"v_max", "exponent", "direction"}, "law.");
    get_if(j, "v_max", l.v_max);
    get_if(j, "exponent", l.exponent);
    get_if(j, "direction", l.direction);
}

void parse_pc_sweep(const ordered_json& j, RunConfig& c) {
    check_keys(j, {"ratios", "n_qubits", "trials"}, "pc_sweep.");
    if (j.contains("ratios")) c.pc_ratios = j.at("ratios").get<std::vector<double>>();
    if (j.contains("n_qubits")) c.pc_n_qubits = j.at("n_qubits").get<std::vector<int>>();
    get_if(j, "trials", c.pc_trials);
}

void parse_registry(const ordered_json& j, RunConfig& c) {
    check_keys(j,
               {"width_px", "height_px", "pixel_pitch_um", "psf_sigma_px", "background_mean",
                "amplitude", "voltage_steps", "threshold_sigma", "absolute_threshold",
                "min_separation_px", "merge_radius_px", "brightness_rel_diff_max",
                "min_track_points", "n_sys", "frames_dir"},
               "registry.");
    get_if(j, "width_px", c.synth.width);
    get_if(j, "height_px", c.synth.height);
    get_if(j, "pixel_pitch_um", c.synth.pixel_pitch_um);
    get_if(j, "psf_sigma_px", c.synth.psf_sigma_px);
    get_if(j, "background_mean", c.synth.background_mean);
    get_if(j, "amplitude", c.synth.amplitude);
    get_if(j, "voltage_steps", c.synth.voltage_steps);
    get_if(j, "threshold_sigma", c.registry.threshold_sigma);
    get_if(j, "absolute_threshold", c.registry.absolute_threshold);
    get_if(j, "min_separation_px", c.registry.min_separation_px);
    get_if(j, "merge_radius_px", c.registry.merge_radius_px);
    get_if(j, "brightness_rel_diff_max", c.registry.brightness_rel_diff_max);
    get_if(j, "min_track_points", c.registry.min_track_points);
    get_if(j, "n_sys", c.n_sys);
    get_if(j, "frames_dir", c.frames_dir);
}

void parse_spam(const ordered_json& j, RunConfig& c) {
    check_keys(j,
               {"lambda_bright", "lambda_dark", "p_charge", "shots", "t_m_us", "t_cycle_us",
                "lambda_bright_bin3", "c_th_list", "records_csv"},
               "spam.");
    get_if(j, "lambda_bright", c.spam.lambda_bright);
    get_if(j, "lambda_dark", c.spam.lambda_dark);
    get_if(j, "p_charge", c.spam.p_charge);
    get_if(j, "shots", c.spam.shots);
    get_if(j, "t_m_us", c.spam.t_m_us);
    get_if(j, "t_cycle_us", c.spam.t_cycle_us);
    get_if(j, "lambda_bright_bin3", c.spam.lambda_bright_bin3);
    if (j.contains("c_th_list")) c.c_th_list = j.at("c_th_list").get<std::vector<double>>();
    get_if(j, "records_csv", c.records_csv);
}

void parse_photonics(const ordered_json& j, RunConfig& c) {
    check_keys(j,
               {"tau_bulk_ns", "tau_on_ns", "tau_off_ns", "xi_zpl", "quantum_efficiency",
                "zpl_fraction", "c_line_fraction", "psb_fraction", "psb_after_filter",
                "detector_qe", "snspd_qe", "readout_counts", "t_m_us", "tau_emitter_ns",
                "eta_na_09", "eta_na_05"},
               "photonics.");
    get_if(j, "tau_bulk_ns", c.lifetimes.tau_bulk_ns);
    get_if(j, "tau_on_ns", c.lifetimes.tau_on_ns);
    get_if(j, "tau_off_ns", c.lifetimes.tau_off_ns);
    get_if(j, "xi_zpl", c.lifetimes.xi_zpl);
    get_if(j, "quantum_efficiency", c.budget.quantum_efficiency);
    get_if(j, "zpl_fraction", c.budget.zpl_fraction);
    get_if(j, "c_line_fraction", c.budget.c_line_fraction);
    get_if(j, "psb_fraction", c.budget.psb_fraction);
    get_if(j, "psb_after_filter", c.budget.psb_after_filter);
    get_if(j, "detector_qe", c.budget.detector_qe);
    get_if(j, "snspd_qe", c.budget.snspd_qe);
    get_if(j, "readout_counts", c.budget.readout_counts);
    get_if(j, "t_m_us", c.budget.t_m_us);
    get_if(j, "tau_emitter_ns", c.budget.tau_emitter_ns);
    get_if(j, "eta_na_09", c.budget.eta_na_09);
    get_if(j, "eta_na_05", c.budget.eta_na_05);
}

void parse_scaling(const ordered_json& j, RunConfig& c) {
    check_keys(j, {"points", "fov_diameter_um", "spot_spacing_um"}, "scaling.");
    if (j.contains("points")) {
        c.scaling_points.clear();
        for (const auto& p : j.at("points")) {
            check_keys(p, {"label", "n_emitter", "n_sys", "p_c", "k_max"}, "scaling.points.");
            ScalingPoint sp;
            get_if(p, "label", sp.label);
            get_if(p, "n_emitter", sp.n_emitter);
            get_if(p, "n_sys", sp.n_sys);
            get_if(p, "p_c", sp.p_c);
            get_if(p, "k_max", sp.k_max);
            c.scaling_points.push_back(std::move(sp));
        }
    }
    get_if(j, "fov_diameter_um", c.fov_diameter_um);
    get_if(j, "spot_spacing_um", c.spot_spacing_um);
}

} // namespace

RunConfig apply_overrides(RunConfig config, const ConfigOverrides& overrides) {
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.out_dir) config.out_dir = *overrides.out_dir;
    if (overrides.threads) config.threads = *overrides.threads;
    return config;
}

RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
    RunConfig config;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw io_error("cannot open config file: " + path.string());
        ordered_json j;
        try {
            j = ordered_json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw config_error("config parse error in " + path.string() + ": " + e.what());
        }
        check_keys(j,
                   {"seed", "out", "threads", "ensemble", "grid", "law", "pc_sweep", "registry",
                    "spam", "photonics", "scaling"},
                   "");
        get_if(j, "seed", config.seed);
        get_if(j, "out", config.out_dir);
        get_if(j, "threads", config.threads);
        if (j.contains("ensemble")) parse_ensemble(j.at("ensemble"), config.ensemble);
        if (j.contains("grid")) parse_grid(j.at("grid"), config.grid);
        if (j.contains("law")) parse_law(j.at("law"), config.law);
        if (j.contains("pc_sweep")) parse_pc_sweep(j.at("pc_sweep"), config);
        if (j.contains("registry")) parse_registry(j.at("registry"), config);
        if (j.contains("spam")) parse_spam(j.at("spam"), config);
        if (j.contains("photonics")) parse_photonics(j.at("photonics"), config);
        if (j.contains("scaling")) parse_scaling(j.at("scaling"), config);
    }
    config = apply_overrides(std::move(config), overrides);
    // One master seed and one thread count feed every module.
    config.ensemble.rng_seed = config.seed;
    config.synth.seed = config.seed;
    config.spam.seed = config.seed;
    config.synth.threads = config.threads;
    config.registry.threads = config.threads;
    config.validate();
    return config;
}

void save_resolved_config(const std::filesystem::path& path, const RunConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["ensemble"] = detail::ensemble_config_to_json(c.ensemble);
    j["grid"] = {{"v0_ghz", c.grid.v0_ghz}, {"delta_v_ghz", c.grid.delta_v_ghz}, {"k_max", c.grid.k_max}};
    j["law"] = {{"v_max", c.law.v_max}, {"exponent", c.law.exponent}, {"direction", c.law.direction}};
    j["pc_sweep"] = {{"ratios", c.pc_ratios}, {"n_qubits", c.pc_n_qubits}, {"trials", c.pc_trials}};
    j["registry"] = {{"width_px", c.synth.width},
                     {"height_px", c.synth.height},
                     {"pixel_pitch_um", c.synth.pixel_pitch_um},
                     {"psf_sigma_px", c.synth.psf_sigma_px},
                     {"background_mean", c.synth.background_mean},
                     {"amplitude", c.synth.amplitude},
                     {"voltage_steps", c.synth.voltage_steps},
                     {"threshold_sigma", c.registry.threshold_sigma},
                     {"absolute_threshold", c.registry.absolute_threshold},
                     {"min_separation_px", c.registry.min_separation_px},
                     {"merge_radius_px", c.registry.merge_radius_px},
                     {"brightness_rel_diff_max", c.registry.brightness_rel_diff_max},
                     {"min_track_points", c.registry.min_track_points},
                     {"n_sys", c.n_sys},
                     {"frames_dir", c.frames_dir}};
    j["spam"] = {{"lambda_bright", c.spam.lambda_bright},
                 {"lambda_dark", c.spam.lambda_dark},
                 {"p_charge", c.spam.p_charge},
                 {"shots", c.spam.shots},
                 {"t_m_us", c.spam.t_m_us},
                 {"t_cycle_us", c.spam.t_cycle_us},
                 {"lambda_bright_bin3", c.spam.lambda_bright_bin3},
                 {"c_th_list", c.c_th_list},
                 {"records_csv", c.records_csv}};
    j["photonics"] = {{"tau_bulk_ns", c.lifetimes.tau_bulk_ns},
                      {"tau_on_ns", c.lifetimes.tau_on_ns},
                      {"tau_off_ns", c.lifetimes.tau_off_ns},
                      {"xi_zpl", c.lifetimes.xi_zpl},
                      {"quantum_efficiency", c.budget.quantum_efficiency},
                      {"zpl_fraction", c.budget.zpl_fraction},
                      {"c_line_fraction", c.budget.c_line_fraction},
                      {"psb_fraction", c.budget.psb_fraction},
                      {"psb_after_filter", c.budget.psb_after_filter},
                      {"detector_qe", c.budget.detector_qe},
                      {"snspd_qe", c.budget.snspd_qe},
                      {"readout_counts", c.budget.readout_counts},
                      {"t_m_us", c.budget.t_m_us},
                      {"tau_emitter_ns", c.budget.tau_emitter_ns},
                      {"eta_na_09", c.budget.eta_na_09},
                      {"eta_na_05", c.budget.eta_na_05}};
    ordered_json points = ordered_json::array();
    for (const ScalingPoint& p : c.scaling_points)
        points.push_back({{"label", p.label},
                          {"n_emitter", p.n_emitter},
                          {"n_sys", p.n_sys},
                          {"p_c", p.p_c},
                          {"k_max", p.k_max}});
    j["scaling"] = {{"points", std::move(points)},
                    {"fov_diameter_um", c.fov_diameter_um},
                    {"spot_spacing_um", c.spot_spacing_um}};

    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

} // namespace emsim
