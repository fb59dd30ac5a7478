#include "sacsp/synth.hpp"

#include <cmath>
#include <random>

#include "sacsp/preprocess.hpp"

namespace sacsp {

void SynthSpec::validate() const {
    if (n_channels < 2) throw_config("synth: n_channels must be >= 2");
    if (!(fs > 0.0)) throw_config("synth: fs must be positive");
    if (!(epoch_seconds > 0.0)) throw_config("synth: epoch_seconds must be positive");
    if (n_epochs_per_class < 1) throw_config("synth: n_epochs_per_class must be >= 1");
    if (noise_sigma < 0.0) throw_config("synth: noise_sigma must be >= 0");
    if (sources.empty()) throw_config("synth: sources must not be empty");
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const SynthSource& s = sources[i];
        const std::string path = "sources[" + std::to_string(i) + "]";
        if (s.mixing.size() != n_channels)
            throw_config("synth: " + path + ".mixing must have n_channels entries");
        if (s.mixing.norm() == 0.0)
            throw_config("synth: " + path + ".mixing must be nonzero");
        const double lo = s.center_hz - s.bandwidth_hz / 2.0;
        const double hi = s.center_hz + s.bandwidth_hz / 2.0;
        if (!(s.bandwidth_hz > 0.0) || !(lo > 0.0) || !(hi < fs / 2.0))
            throw_config("synth: " + path + ".center_hz/bandwidth_hz out of range (need 0 < center +- bandwidth/2 < fs/2)");
        if (s.class1_amp < 0.0 || s.class2_amp < 0.0)
            throw_config("synth: " + path + " amplitudes must be >= 0");
    }
}

namespace {

struct SourceBand {
    BiquadCascade filter;
    double gain = 1.0;  // scales the filtered noise to unit variance
};

// Expected variance of zero-phase-filtered unit white noise: the mean of
// |H|^4 over frequency (filtfilt applies the squared magnitude).
double filtered_noise_variance(const BiquadCascade& band, double fs) {
    const int grid = 2048;
    double acc = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double f = fs * (static_cast<double>(i) + 0.5) / (2.0 * grid);
        const double h = std::abs(frequency_response(band, f));
        acc += h * h * h * h;
    }
    return acc / static_cast<double>(grid);
}

// Band-limited unit-variance Gaussian process: white noise pushed through
// the zero-phase bandpass, generated long and cropped to kill edge
// transients, scaled so the process variance is 1 in expectation.
RealVector bandlimited_noise(std::mt19937_64& rng, const SourceBand& band, Index t) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Index total = 3 * t;
    std::vector<double> white(total);
    for (double& v : white) v = gauss(rng);
    std::vector<double> filtered = filtfilt(band.filter, white);
    RealVector out(t);
    for (Index i = 0; i < t; ++i)
        out(i) = band.gain * filtered[static_cast<std::size_t>(t + i)];
    return out;
}

Epoch make_epoch(const SynthSpec& spec, const std::vector<SourceBand>& bands,
                 std::size_t epoch_index, Index t) {
    std::mt19937_64 rng(derive_seed(spec.seed, epoch_index));
    const int label = (epoch_index % 2 == 0) ? 1 : 2;

    Epoch e;
    e.label = label;
    e.fs = spec.fs;
    e.data = RealMatrix::Zero(spec.n_channels, t);

    for (std::size_t s = 0; s < spec.sources.size(); ++s) {
        const SynthSource& src = spec.sources[s];
        const double amp = (label == 1) ? src.class1_amp : src.class2_amp;
        const RealVector series = bandlimited_noise(rng, bands[s], t);
        if (amp != 0.0) {
            const RealVector mix = src.mixing / src.mixing.norm();
            e.data.noalias() += amp * mix * series.transpose();
        }
    }
    if (spec.noise_sigma > 0.0) {
        std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
        for (Index c = 0; c < spec.n_channels; ++c)
            for (Index j = 0; j < t; ++j) e.data(c, j) += gauss(rng);
    }
    // remove channel means so downstream covariance statistics see
    // zero-mean windows, as the bandpassed pipeline guarantees
    e.data.colwise() -= e.data.rowwise().mean().eval();
    return e;
}

}  // namespace

namespace {

std::vector<SourceBand> make_source_bands(const SynthSpec& spec) {
    std::vector<SourceBand> bands;
    bands.reserve(spec.sources.size());
    for (const SynthSource& s : spec.sources) {
        SourceBand band;
        band.filter = design_butter_bandpass(6, s.center_hz - s.bandwidth_hz / 2.0,
                                             s.center_hz + s.bandwidth_hz / 2.0,
                                             spec.fs);
        band.gain = 1.0 / std::sqrt(filtered_noise_variance(band.filter, spec.fs));
        bands.push_back(std::move(band));
    }
    return bands;
}

}  // namespace

EpochSet generate(const SynthSpec& spec) {
    spec.validate();
    const Index t = static_cast<Index>(std::llround(spec.epoch_seconds * spec.fs));
    if (t < 8) throw_config("synth: epoch too short for the source bandpass filters");

    const std::vector<SourceBand> bands = make_source_bands(spec);

    const std::size_t total = static_cast<std::size_t>(2 * spec.n_epochs_per_class);
    EpochSet out;
    out.fs = spec.fs;
    out.n_channels = spec.n_channels;
    out.epochs.resize(total);

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < total; ++i)
        out.epochs[i] = make_epoch(spec, bands, i, t);
    return out;
}

EpochSet generate_serial_impl(const SynthSpec& spec) {
    spec.validate();
    const Index t = static_cast<Index>(std::llround(spec.epoch_seconds * spec.fs));
    if (t < 8) throw_config("synth: epoch too short for the source bandpass filters");

    const std::vector<SourceBand> bands = make_source_bands(spec);

    const std::size_t total = static_cast<std::size_t>(2 * spec.n_epochs_per_class);
    EpochSet out;
    out.fs = spec.fs;
    out.n_channels = spec.n_channels;
    out.epochs.resize(total);
    for (std::size_t i = 0; i < total; ++i) out.epochs[i] = make_epoch(spec, bands, i, t);
    return out;
}

RecoveryScore reference_recovery_score(const TrainedFilterBank& bank,
                                       const SynthSpec& spec) {
    RecoveryScore score;
    const Index t = bank.t;

    for (int class_id = 1; class_id <= 2; ++class_id) {
        // discriminative source: largest power advantage for this class
        int best_src = 0;
        double best_gap = -1.0;
        for (std::size_t s = 0; s < spec.sources.size(); ++s) {
            const SynthSource& src = spec.sources[s];
            const double own = (class_id == 1) ? src.class1_amp : src.class2_amp;
            const double other = (class_id == 1) ? src.class2_amp : src.class1_amp;
            const double gap = own * own - other * other;
            if (gap > best_gap) {
                best_gap = gap;
                best_src = static_cast<int>(s);
            }
        }
        const std::size_t ci = static_cast<std::size_t>(class_id - 1);
        score.discriminative_source[ci] = best_src;
        const RealVector target =
            spec.sources[static_cast<std::size_t>(best_src)].mixing.normalized();

        double best_cos = 0.0;
        for (std::size_t p = 0; p < bank.pairs.size(); ++p) {
            if (bank.pairs[p].class_id != class_id) continue;
            const RealVector pat = bank.patterns.col(static_cast<Index>(p));
            const double c = std::abs(pat.dot(target)) / pat.norm();
            best_cos = std::max(best_cos, c);

            // spectral peak location over the one-sided bins
            const RealVector& w = bank.pairs[p].spectral.weights;
            Index kmax = 0;
            double vmax = -1.0;
            for (Index k = 1; k <= t / 2; ++k) {
                if (w(k) > vmax) {
                    vmax = w(k);
                    kmax = k;
                }
            }
            const double f = static_cast<double>(kmax) * bank.fs / static_cast<double>(t);
            score.peak_error_hz[ci].push_back(std::abs(
                f - spec.sources[static_cast<std::size_t>(best_src)].center_hz));
        }
        score.pattern_cosine[ci] = best_cos;
    }
    return score;
}

SynthSpec default_synth_spec(std::uint64_t seed) {
    SynthSpec spec;
    spec.n_channels = 16;
    spec.fs = 100.0;
    spec.epoch_seconds = 1.0;
    spec.n_epochs_per_class = 68;
    spec.noise_sigma = 0.5;
    spec.seed = seed;

    SynthSource discriminative;
    discriminative.mixing = RealVector::Zero(16);
    discriminative.mixing << 0.0, 0.0, 0.5, 0.6, 0.5, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0;
    discriminative.mixing.normalize();
    discriminative.center_hz = 10.0;
    discriminative.bandwidth_hz = 2.0;
    discriminative.class1_amp = 2.0;
    discriminative.class2_amp = 0.7;

    SynthSource distractor;
    distractor.mixing = RealVector::Zero(16);
    distractor.mixing << 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.4, 0.55, 0.55,
        0.4, 0.0, 0.0, 0.0, 0.0;
    distractor.mixing.normalize();
    distractor.center_hz = 20.0;
    distractor.bandwidth_hz = 8.0;
    distractor.class1_amp = 2.0;
    distractor.class2_amp = 2.0;

    spec.sources = {discriminative, distractor};
    return spec;
}

namespace reference {
EpochSet generate_serial(const SynthSpec& spec) { return generate_serial_impl(spec); }
}  // namespace reference

}  // namespace sacsp
