#pragma once

#include <filesystem>

#include "emsim/config.hpp"

namespace emsim {

/// Each runner executes one experiment into config.out_dir, writing its data
/// files plus resolved_config.json. All runners are deterministic per seed
/// and overwrite their outputs byte-identically on rerun.

/// Writes pc_curve.csv.
void run_pc_sweep(const RunConfig& config);

/// Synthesizes (or loads registry.frames_dir) a frame stack, registers it,
/// and writes lookup_table.json, lookup_table.csv, stats.csv.
void run_registry(const RunConfig& config);

/// Simulates (or ingests spam.records_csv) readout records and writes
/// spam_sweep.csv, fit_report.json, and records.csv when simulating.
void run_spam(const RunConfig& config);

/// Writes budget.json; returns the text table for stdout.
std::string run_budget(const RunConfig& config);

/// Writes scaling.csv and scaling.json.
void run_scaling(const RunConfig& config);

/// Synthesizes a stack to <out>/frames/ with the ensemble ground truth
/// (ensemble.json, ensemble.csv) beside it.
void run_synth_frames(const RunConfig& config);

} // namespace emsim
