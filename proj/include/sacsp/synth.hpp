#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sacsp/algorithms.hpp"
#include "sacsp/types.hpp"

namespace sacsp {

/// One planted source: a fixed mixing column carrying a band-limited
/// Gaussian process whose amplitude depends on the class.
struct SynthSource {
    RealVector mixing;      // length n, unit l2 norm
    double center_hz = 0.0;
    double bandwidth_hz = 0.0;
    double class1_amp = 0.0;
    double class2_amp = 0.0;
};

struct SynthSpec {
    Index n_channels = 16;
    double fs = 100.0;
    double epoch_seconds = 1.0;
    Index n_epochs_per_class = 68;
    std::vector<SynthSource> sources;
    double noise_sigma = 0.5;  // microvolts
    std::uint64_t seed = 0;

    void validate() const;  // throws with the offending field path
};

/// Deterministic generator: epoch e of class c is
///   sum_s mixing_s * amp_{c,s} * bandlimited_noise + noise_sigma * white,
/// channel means removed. Epochs alternate class 1/2; per-epoch RNG streams
/// are derived from (seed, epoch index) so parallel generation is
/// reproducible.
EpochSet generate(const SynthSpec& spec);

/// Ground-truth recovery diagnostics against the planted spec.
struct RecoveryScore {
    std::array<double, 2> pattern_cosine{};          // per class, max |cos| to the
                                                     // class's discriminative column
    std::array<std::vector<double>, 2> peak_error_hz;  // per selected spectral filter
    std::array<int, 2> discriminative_source{};       // source index used per class
};

RecoveryScore reference_recovery_score(const TrainedFilterBank& bank,
                                       const SynthSpec& spec);

/// The default desk-scale spec: a 10 Hz discriminative source against a
/// matched broadband distractor on orthogonal mixing columns.
SynthSpec default_synth_spec(std::uint64_t seed);

}  // namespace sacsp
