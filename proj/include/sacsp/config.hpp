#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sacsp/algorithms.hpp"
#include "sacsp/eval.hpp"
#include "sacsp/synth.hpp"

namespace sacsp {

/// Parsed CLI config file. Every section is optional in the JSON; missing
/// sections fall back to the documented defaults (see README).
struct CliConfig {
    struct Preprocess {
        double target_fs = 100.0;
        double band_low_hz = 7.0;
        double band_high_hz = 30.0;
        int filter_order = 6;
        double window_seconds = 1.0;
    } preprocess;

    SacspConfig sacsp;

    SynthSpec synth;               // calibration-set spec
    std::optional<SynthSpec> synth_online;  // overrides for the online set

    struct Eval {
        Protocol protocol = Protocol::Transfer;
        int repeats = 10;
        int k = 5;
        std::uint64_t seed = 0;
    } eval;
};

/// Defaults used when no config file is given (or sections are omitted).
CliConfig default_cli_config();

/// Parse a JSON config file; schema violations throw a Config error naming
/// the offending field path (e.g. "synth.sources[0].center_hz").
CliConfig load_cli_config(const std::string& path);

/// The online-set spec: the explicit override section if present, otherwise
/// the calibration spec with doubled epochs and a shifted seed.
SynthSpec online_spec(const CliConfig& config);

}  // namespace sacsp
