#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "emsim/ensemble.hpp"
#include "emsim/graph.hpp"
#include "emsim/photonics.hpp"
#include "emsim/registry.hpp"
#include "emsim/spam.hpp"

namespace emsim {

/// Formats a double with 9 significant digits; all CSV output goes through
/// this so reruns diff cleanly.
std::string fmt_g9(double v);

// --- ensemble ---
void save_ensemble_json(const std::filesystem::path& path, const EnsembleConfig& config,
                        const std::vector<Emitter>& emitters);
void save_ensemble_csv(const std::filesystem::path& path, const std::vector<Emitter>& emitters);
std::vector<Emitter> load_ensemble_json(const std::filesystem::path& path,
                                        EnsembleConfig* config_out = nullptr);

// --- graph ---
void save_pc_curve_csv(const std::filesystem::path& path, const PcCurve& curve);
void save_channel_graph_json(const std::filesystem::path& path, const ChannelGraph& graph);
void save_scaling_csv(const std::filesystem::path& path,
                      const std::vector<std::tuple<double, double, std::string>>& points);

// --- registry ---
/// Frame stacks persist as one directory: 16-bit grayscale PNGs named
/// k{channel:02}_v{step:03}.png plus meta.json.
void save_stack(const std::filesystem::path& dir, const FrameStack& stack);
FrameStack load_stack(const std::filesystem::path& dir);
void save_lookup_json(const std::filesystem::path& path, const LookupTable& table);
void save_lookup_csv(const std::filesystem::path& path, const LookupTable& table);
void save_stats_csv(const std::filesystem::path& path, const EmitterStats& stats);

// --- spam ---
void save_records_csv(const std::filesystem::path& path,
                      const std::vector<ReadoutRecord>& records);
std::vector<ReadoutRecord> load_records_csv(const std::filesystem::path& path);
void save_spam_sweep_csv(const std::filesystem::path& path,
                         const std::vector<SpamResult>& results);
void save_fit_report_json(const std::filesystem::path& path, const MixtureFit& fit_bin1,
                          const MixtureFit& fit_bin3, double n_m);

// --- photonics ---
void save_budget_json(const std::filesystem::path& path, const LifetimeSet& lifetimes,
                      const PhotonBudget& budget, double purcell, const DetectionReport& det);
std::string budget_table_text(const LifetimeSet& lifetimes, const PhotonBudget& budget,
                              double purcell, const DetectionReport& det);

// --- png ---
void write_png16(const std::filesystem::path& path, const Frame& frame);
Frame read_png16(const std::filesystem::path& path);

} // namespace emsim
