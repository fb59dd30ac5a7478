#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "sacsp/types.hpp"

namespace sacsp {

struct Biquad {
    double b0, b1, b2;  // numerator
    double a1, a2;      // denominator (a0 normalized to 1)
};

struct FilterDesign {
    int order = 0;        // total digital filter order
    double low_hz = 0.0;  // 0 for lowpass
    double high_hz = 0.0;
    double fs = 0.0;
};

/// Second-order-section cascade. Sections are all stable by construction.
struct BiquadCascade {
    std::vector<Biquad> sections;
    FilterDesign design;
};

/// Butterworth bandpass via analog prototype -> bandpass transform ->
/// bilinear transform. `order` is the total digital order (must be even);
/// the band edges land at -3 dB exactly (edges are pre-warped).
BiquadCascade design_butter_bandpass(int order, double low_hz, double high_hz, double fs);

/// Butterworth lowpass, same route. Used as the decimation anti-alias filter.
BiquadCascade design_butter_lowpass(int order, double cutoff_hz, double fs);

/// Complex frequency response of the cascade at f Hz (single pass).
std::complex<double> frequency_response(const BiquadCascade& filter, double f_hz);

/// Forward-backward zero-phase filtering with odd-reflection edge padding of
/// 3x the filter order and steady-state initial conditions.
std::vector<double> filtfilt(const BiquadCascade& filter, std::span<const double> signal);

/// filtfilt applied to every row of a matrix (channels x samples).
RealMatrix filtfilt_rows(const BiquadCascade& filter, const RealMatrix& data);

/// Integer-factor downsampling with a zero-phase 8th-order Butterworth
/// anti-alias lowpass at 0.45 * target_fs. Marker indices are rescaled.
ContinuousRecording decimate(const ContinuousRecording& recording, double target_fs);

/// Subtract the across-channel mean at every time sample.
RealMatrix common_average_reference(const RealMatrix& data);
Epoch common_average_reference(const Epoch& epoch);
ContinuousRecording common_average_reference(const ContinuousRecording& recording);

/// Slice one epoch per marker. Markers flagged trial_end are skipped when
/// drop_trial_end is set.
EpochSet epoch_stream(const ContinuousRecording& recording, double window_s,
                      bool drop_trial_end);

/// Equalize class counts by seeded subsampling of the majority class
/// (without replacement, original epoch order preserved).
EpochSet balance_classes(const EpochSet& set, std::uint64_t seed);

/// Zero-phase bandpass of every epoch in a set (the trainers expect
/// bandpassed epochs).
EpochSet bandpass_epochs(const EpochSet& set, double low_hz, double high_hz,
                         int order = 6);

enum class PipelineOrder {
    EpochThenFilter,   // decimate -> epoch -> CAR -> bandpass (default)
    FilterThenEpoch,   // decimate -> CAR -> bandpass -> epoch
};

struct PipelineConfig {
    double target_fs = 100.0;
    double low_hz = 7.0;
    double high_hz = 30.0;
    int filter_order = 6;
    double window_s = 1.0;
    bool car = true;
    bool drop_trial_end = true;
    PipelineOrder order = PipelineOrder::EpochThenFilter;
};

EpochSet preprocess_pipeline(const ContinuousRecording& recording,
                             const PipelineConfig& config);

}  // namespace sacsp
