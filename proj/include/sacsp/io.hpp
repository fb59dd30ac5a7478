#pragma once

#include <string>

#include "sacsp/classify.hpp"
#include "sacsp/eval.hpp"
#include "sacsp/types.hpp"

namespace sacsp {

/// Binary epoch container, magic "EPD1": little-endian u32 header
/// (n_channels, n_samples, n_epochs, fs_hz), one label byte per epoch,
/// then float64 payload, epoch-major then row-major. Round-trips bit-exactly.
void write_epoch_file(const std::string& path, const EpochSet& set);
EpochSet read_epoch_file(const std::string& path);

/// Versioned JSON model document. load(save(m)) predicts identically.
void save_model(const std::string& path, const SacspModel& model);
SacspModel load_model(const std::string& path);

void write_report_json(const std::string& path, const EvalReport& report,
                       std::uint64_t seed);
void write_report_csv(const std::string& path, const EvalReport& report);

/// Writes spectral_filters.csv / spatial_patterns.csv / spectral_filters.svg
/// into out_dir. Spectral exports are one-sided (bins 0..t/2) and unit-norm.
void export_model(const SacspModel& model, const std::string& out_dir);

}  // namespace sacsp
