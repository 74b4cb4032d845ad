#include "emsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emsim/errors.hpp"
#include "json_detail.hpp"

namespace emsim {

using ordered_json = nlohmann::ordered_json;

std::string fmt_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!out) throw io_error("write failed: " + path.string());
}

ordered_json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open for reading: " + path.string());
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw io_error("json parse error in " + path.string() + ": " + e.what());
    }
}

} // namespace

namespace detail {

ordered_json cdf_to_json(const EmpiricalCdf& cdf) {
    ordered_json arr = ordered_json::array();
    for (const auto& [x, p] : cdf.points) arr.push_back(ordered_json::array({x, p}));
    return arr;
}

EmpiricalCdf cdf_from_json(const ordered_json& arr) {
    EmpiricalCdf cdf;
    for (const auto& pt : arr) cdf.points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
    cdf.validate();
    return cdf;
}

ordered_json ensemble_config_to_json(const EnsembleConfig& c) {
    ordered_json j;
    j["n_qubit"] = c.n_qubit;
    j["v_inh_ghz"] = c.v_inh_ghz;
    if (c.sigma_is_primary)
        j["tuning_sigma_ghz"] = c.tuning_sigma_ghz;
    else
        j["mean_tuning_ghz"] = c.mean_tuning_ghz;
    j["derived_mean_tuning_ghz"] = c.effective_mean_ghz();
    j["derived_tuning_sigma_ghz"] = c.effective_sigma_ghz();
    j["interval_mode"] = c.interval_mode == IntervalMode::OneSided ? "one_sided" : "symmetric";
    j["fov_um"] = c.fov_um;
    j["min_separation_um"] = c.min_separation_um;
    j["brightness"] = c.brightness;
    j["linewidth_cdf_mhz"] = cdf_to_json(c.linewidth_cdf_mhz);
    j["splitting_cdf_ghz"] = cdf_to_json(c.splitting_cdf_ghz);
    j["rng_seed"] = c.rng_seed;
    return j;
}

EnsembleConfig ensemble_config_from_json(const ordered_json& j) {
    EnsembleConfig c;
    c.n_qubit = j.at("n_qubit").get<int>();
    c.v_inh_ghz = j.at("v_inh_ghz").get<double>();
    if (j.contains("tuning_sigma_ghz")) {
        c.sigma_is_primary = true;
        c.tuning_sigma_ghz = j.at("tuning_sigma_ghz").get<double>();
    } else {
        c.sigma_is_primary = false;
        c.mean_tuning_ghz = j.at("mean_tuning_ghz").get<double>();
    }
    if (j.contains("interval_mode"))
        c.interval_mode = j.at("interval_mode").get<std::string>() == "symmetric"
                              ? IntervalMode::Symmetric
                              : IntervalMode::OneSided;
    if (j.contains("fov_um")) c.fov_um = j.at("fov_um").get<double>();
    if (j.contains("min_separation_um")) c.min_separation_um = j.at("min_separation_um").get<double>();
    if (j.contains("brightness")) c.brightness = j.at("brightness").get<double>();
    if (j.contains("linewidth_cdf_mhz")) c.linewidth_cdf_mhz = cdf_from_json(j.at("linewidth_cdf_mhz"));
    if (j.contains("splitting_cdf_ghz")) c.splitting_cdf_ghz = cdf_from_json(j.at("splitting_cdf_ghz"));
    if (j.contains("rng_seed")) c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    return c;
}

} // namespace detail

void save_ensemble_json(const std::filesystem::path& path, const EnsembleConfig& config,
                        const std::vector<Emitter>& emitters) {
    ordered_json j;
    j["schema_version"] = 1;
    j["config"] = detail::ensemble_config_to_json(config);
    ordered_json arr = ordered_json::array();
    for (const Emitter& e : emitters) {
        ordered_json je;
        je["id"] = e.id;
        je["x_um"] = e.x_um;
        je["y_um"] = e.y_um;
        je["f0_ghz"] = e.f0_ghz;
        je["delta_vm_ghz"] = e.delta_vm_ghz;
        je["linewidth_mhz"] = e.linewidth_mhz;
        je["splitting_ghz"] = e.splitting_ghz;
        je["brightness"] = e.brightness;
        arr.push_back(std::move(je));
    }
    j["emitters"] = std::move(arr);
    write_text(path, j.dump(2) + "\n");
}

void save_ensemble_csv(const std::filesystem::path& path, const std::vector<Emitter>& emitters) {
    auto out = open_out(path);
    out << "id,x_um,y_um,f0_ghz,delta_vm_ghz,linewidth_mhz,splitting_ghz,brightness\n";
    for (const Emitter& e : emitters)
        out << e.id << ',' << fmt_g9(e.x_um) << ',' << fmt_g9(e.y_um) << ',' << fmt_g9(e.f0_ghz)
            << ',' << fmt_g9(e.delta_vm_ghz) << ',' << fmt_g9(e.linewidth_mhz) << ','
            << fmt_g9(e.splitting_ghz) << ',' << fmt_g9(e.brightness) << '\n';
}

std::vector<Emitter> load_ensemble_json(const std::filesystem::path& path,
                                        EnsembleConfig* config_out) {
    const ordered_json j = read_json(path);
    if (config_out) *config_out = detail::ensemble_config_from_json(j.at("config"));
    std::vector<Emitter> emitters;
    for (const auto& je : j.at("emitters")) {
        Emitter e;
        e.id = je.at("id").get<int>();
        e.x_um = je.at("x_um").get<double>();
        e.y_um = je.at("y_um").get<double>();
        e.f0_ghz = je.at("f0_ghz").get<double>();
        e.delta_vm_ghz = je.at("delta_vm_ghz").get<double>();
        e.linewidth_mhz = je.at("linewidth_mhz").get<double>();
        e.splitting_ghz = je.at("splitting_ghz").get<double>();
        e.brightness = je.at("brightness").get<double>();
        emitters.push_back(e);
    }
    return emitters;
}

void save_pc_curve_csv(const std::filesystem::path& path, const PcCurve& curve) {
    auto out = open_out(path);
    out << "ratio,n_qubit,p_c_mean,p_c_stderr,trials\n";
    for (std::size_t ri = 0; ri < curve.ratios.size(); ++ri)
        for (std::size_t si = 0; si < curve.n_qubits.size(); ++si)
            out << fmt_g9(curve.ratios[ri]) << ',' << curve.n_qubits[si] << ','
                << fmt_g9(curve.p_c_mean[ri][si]) << ',' << fmt_g9(curve.p_c_stderr[ri][si]) << ','
                << curve.trials << '\n';
}

void save_channel_graph_json(const std::filesystem::path& path, const ChannelGraph& graph) {
    ordered_json j;
    ordered_json nodes = ordered_json::array();
    for (std::size_t id = 0; id < graph.node_channels.size(); ++id) {
        ordered_json node;
        node["id"] = id;
        node["channels"] = graph.node_channels[id];
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    ordered_json edges = ordered_json::array();
    for (const auto& [a, b] : graph.edges) edges.push_back(ordered_json::array({a, b}));
    j["edges"] = std::move(edges);
    write_text(path, j.dump(2) + "\n");
}

void save_scaling_csv(const std::filesystem::path& path,
                      const std::vector<std::tuple<double, double, std::string>>& points) {
    auto out = open_out(path);
    out << "n_qubit,n_link,label\n";
    for (const auto& [n_qubit, n_link, label] : points)
        out << fmt_g9(n_qubit) << ',' << fmt_g9(n_link) << ',' << label << '\n';
}

void save_stack(const std::filesystem::path& dir, const FrameStack& stack) {
    stack.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory: " + dir.string());

    ordered_json meta;
    meta["schema_version"] = 1;
    meta["width"] = stack.width;
    meta["height"] = stack.height;
    meta["pixel_pitch_um"] = stack.pixel_pitch_um;
    meta["voltages"] = stack.voltages;
    meta["grid"] = {{"v0_ghz", stack.grid.v0_ghz},
                    {"delta_v_ghz", stack.grid.delta_v_ghz},
                    {"k_max", stack.grid.k_max}};
    meta["seed"] = stack.seed;
    write_text(dir / "meta.json", meta.dump(2) + "\n");

    char name[32];
    for (int k = 1; k <= stack.grid.k_max; ++k)
        for (std::size_t step = 0; step < stack.voltages.size(); ++step) {
            std::snprintf(name, sizeof(name), "k%02d_v%03zu.png", k, step);
            write_png16(dir / name, stack.frames[static_cast<std::size_t>(k - 1)][step]);
        }
}

FrameStack load_stack(const std::filesystem::path& dir) {
    const ordered_json meta = read_json(dir / "meta.json");
    FrameStack stack;
    stack.width = meta.at("width").get<int>();
    stack.height = meta.at("height").get<int>();
    stack.pixel_pitch_um = meta.at("pixel_pitch_um").get<double>();
    stack.voltages = meta.at("voltages").get<std::vector<double>>();
    stack.grid.v0_ghz = meta.at("grid").at("v0_ghz").get<double>();
    stack.grid.delta_v_ghz = meta.at("grid").at("delta_v_ghz").get<double>();
    stack.grid.k_max = meta.at("grid").at("k_max").get<int>();
    if (meta.contains("seed")) stack.seed = meta.at("seed").get<std::uint64_t>();

    stack.frames.assign(static_cast<std::size_t>(stack.grid.k_max),
                        std::vector<Frame>(stack.voltages.size()));
    char name[32];
    for (int k = 1; k <= stack.grid.k_max; ++k)
        for (std::size_t step = 0; step < stack.voltages.size(); ++step) {
            std::snprintf(name, sizeof(name), "k%02d_v%03zu.png", k, step);
            stack.frames[static_cast<std::size_t>(k - 1)][step] = read_png16(dir / name);
        }
    stack.validate();
    return stack;
}

void save_lookup_json(const std::filesystem::path& path, const LookupTable& table) {
    ordered_json j;
    j["schema_version"] = 1;
    j["k_max"] = table.k_max;
    j["n_emitters"] = table.n_emitters;
    ordered_json channels = ordered_json::object();
    for (const auto& [k, entries] : table.channels) {
        ordered_json arr = ordered_json::array();
        for (const LookupEntry& e : entries) {
            ordered_json je;
            je["id"] = e.emitter_id;
            je["x_um"] = e.x_um;
            je["y_um"] = e.y_um;
            je["best_voltage_v"] = e.best_voltage_v;
            je["brightness"] = e.brightness;
            arr.push_back(std::move(je));
        }
        channels[std::to_string(k)] = std::move(arr);
    }
    j["channels"] = std::move(channels);
    write_text(path, j.dump(2) + "\n");
}

void save_lookup_csv(const std::filesystem::path& path, const LookupTable& table) {
    auto out = open_out(path);
    out << "channel,emitter_id,x_um,y_um,best_voltage_v,brightness\n";
    for (const auto& [k, entries] : table.channels)
        for (const LookupEntry& e : entries)
            out << k << ',' << e.emitter_id << ',' << fmt_g9(e.x_um) << ',' << fmt_g9(e.y_um)
                << ',' << fmt_g9(e.best_voltage_v) << ',' << fmt_g9(e.brightness) << '\n';
}

void save_stats_csv(const std::filesystem::path& path, const EmitterStats& stats) {
    auto out = open_out(path);
    out << "n_spot,n_spot_prime,per_channel_avg,n_emitter\n";
    out << fmt_g9(stats.n_spot) << ',' << fmt_g9(stats.n_spot_prime) << ','
        << fmt_g9(stats.per_channel_avg) << ',' << fmt_g9(stats.n_emitter) << '\n';
}

void save_records_csv(const std::filesystem::path& path,
                      const std::vector<ReadoutRecord>& records) {
    auto out = open_out(path);
    out << "shot,bin1,bin2,bin3\n";
    for (std::size_t i = 0; i < records.size(); ++i)
        out << i << ',' << records[i].bin1 << ',' << records[i].bin2 << ',' << records[i].bin3
            << '\n';
}

std::vector<ReadoutRecord> load_records_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "shot,bin1,bin2,bin3")
        throw io_error("records csv: bad header in " + path.string());
    std::vector<ReadoutRecord> records;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        ReadoutRecord r;
        long long shot;
        if (std::sscanf(line.c_str(), "%lld,%d,%d,%d", &shot, &r.bin1, &r.bin2, &r.bin3) != 4)
            throw io_error("records csv: parse error at " + path.string() + ":" +
                           std::to_string(row));
        if (r.bin1 < 0 || r.bin2 < 0 || r.bin3 < 0)
            throw io_error("records csv: negative count at " + path.string() + ":" +
                           std::to_string(row));
        records.push_back(r);
    }
    return records;
}

void save_spam_sweep_csv(const std::filesystem::path& path,
                         const std::vector<SpamResult>& results) {
    auto out = open_out(path);
    out << "c_th,e_spam,n_m,p_success\n";
    for (const SpamResult& r : results) {
        out << fmt_g9(r.c_th) << ',';
        if (r.empty)
            out << "nan,nan,";
        else
            out << fmt_g9(r.e_spam) << ',' << r.n_m << ',';
        out << fmt_g9(r.p_success) << '\n';
    }
}

void save_fit_report_json(const std::filesystem::path& path, const MixtureFit& fit_bin1,
                          const MixtureFit& fit_bin3, double n_m) {
    auto fit_json = [](const MixtureFit& f) {
        ordered_json j;
        j["p0"] = f.p0;
        j["lambda1"] = f.lambda1;
        j["lambda2"] = f.lambda2;
        j["log_likelihood"] = f.log_likelihood;
        j["em_iterations"] = f.ll_trace.size();
        return j;
    };
    ordered_json j;
    j["schema_version"] = 1;
    j["bin1_fit"] = fit_json(fit_bin1);
    j["bin3_fit"] = fit_json(fit_bin3);
    j["n_m"] = n_m;
    write_text(path, j.dump(2) + "\n");
}

namespace {

ordered_json budget_json(const LifetimeSet& lifetimes, const PhotonBudget& budget, double purcell,
                         const DetectionReport& det) {
    ordered_json j;
    j["schema_version"] = 1;
    j["lifetimes"] = {{"tau_bulk_ns", lifetimes.tau_bulk_ns},
                      {"tau_on_ns", lifetimes.tau_on_ns},
                      {"tau_off_ns", lifetimes.tau_off_ns},
                      {"xi_zpl", lifetimes.xi_zpl}};
    j["purcell_factor"] = purcell;
    j["inputs"] = {{"quantum_efficiency", budget.quantum_efficiency},
                   {"zpl_fraction", budget.zpl_fraction},
                   {"c_line_fraction", budget.c_line_fraction},
                   {"psb_fraction", budget.psb_fraction},
                   {"psb_after_filter", budget.psb_after_filter},
                   {"detector_qe", budget.detector_qe},
                   {"snspd_qe", budget.snspd_qe},
                   {"readout_counts", budget.readout_counts},
                   {"t_m_us", budget.t_m_us},
                   {"tau_emitter_ns", budget.tau_emitter_ns},
                   {"eta_na_09", budget.eta_na_09},
                   {"eta_na_05", budget.eta_na_05}};
    j["derived"] = {{"photon_total", det.photon_total},
                    {"zpl_to_psb_ratio", det.zpl_to_psb_ratio},
                    {"photon_zpl", det.photon_zpl},
                    {"photon_zpl_rounded", det.photon_zpl_rounded},
                    {"p_det", det.p_det},
                    {"p_det_rounded", det.p_det_rounded},
                    {"p_det_snspd", det.p_det_snspd}};
    return j;
}

} // namespace

void save_budget_json(const std::filesystem::path& path, const LifetimeSet& lifetimes,
                      const PhotonBudget& budget, double purcell, const DetectionReport& det) {
    write_text(path, budget_json(lifetimes, budget, purcell, det).dump(2) + "\n");
}

std::string budget_table_text(const LifetimeSet& lifetimes, const PhotonBudget& budget,
                              double purcell, const DetectionReport& det) {
    std::ostringstream out;
    auto row = [&](const char* label, const std::string& value) {
        out << "  " << label;
        for (std::size_t i = std::string(label).size(); i < 28; ++i) out << ' ';
        out << value << '\n';
    };
    out << "spin-photon interface budget\n";
    row("tau_bulk / on / off (ns)", fmt_g9(lifetimes.tau_bulk_ns) + " / " +
                                        fmt_g9(lifetimes.tau_on_ns) + " / " +
                                        fmt_g9(lifetimes.tau_off_ns));
    row("xi_zpl", fmt_g9(lifetimes.xi_zpl));
    row("purcell factor F_p", fmt_g9(purcell));
    row("readout counts (PSB)", fmt_g9(budget.readout_counts));
    row("readout window (us)", fmt_g9(budget.t_m_us));
    row("emitter lifetime (ns)", fmt_g9(budget.tau_emitter_ns));
    row("photon_total", fmt_g9(det.photon_total));
    row("ZPL-C/PSB ratio", fmt_g9(det.zpl_to_psb_ratio));
    row("photon_zpl", fmt_g9(det.photon_zpl) + " (rounded " + fmt_g9(det.photon_zpl_rounded) + ")");
    row("p_det", fmt_g9(det.p_det) + " (rounded " + fmt_g9(det.p_det_rounded) + ")");
    row("p_det (SNSPD)", fmt_g9(det.p_det_snspd));
    row("eta(NA=0.9) / eta(NA=0.5)", fmt_g9(budget.eta_na_09) + " / " + fmt_g9(budget.eta_na_05));
    return out.str();
}

} // namespace emsim
