#include "sacsp/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace sacsp {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Analog Butterworth lowpass prototype poles (unit cutoff, left half plane).
std::vector<cplx> prototype_poles(int n) {
    std::vector<cplx> poles;
    poles.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double theta = kPi * (2.0 * k + n + 1.0) / (2.0 * n);
        poles.emplace_back(std::cos(theta), std::sin(theta));
    }
    return poles;
}

cplx bilinear(cplx s, double k) { return (k + s) / (k - s); }

// Group digital poles into conjugate/real pairs and attach one zero pair per
// section. zero_pair holds the two digital zeros each section receives.
std::vector<Biquad> make_sections(std::vector<cplx> poles,
                                  const std::array<double, 2>& zero_pair,
                                  double gain) {
    std::vector<std::array<cplx, 2>> pairs;
    std::vector<cplx> reals;
    for (const cplx& p : poles) {
        if (std::abs(p.imag()) > 1e-12 * std::max(1.0, std::abs(p))) {
            if (p.imag() > 0.0) pairs.push_back({p, std::conj(p)});
        } else {
            reals.push_back(p);
        }
    }
    std::sort(reals.begin(), reals.end(),
              [](const cplx& a, const cplx& b) { return a.real() < b.real(); });
    for (std::size_t i = 0; i + 1 < reals.size(); i += 2)
        pairs.push_back({reals[i], reals[i + 1]});

    std::vector<Biquad> sections;
    sections.reserve(pairs.size());
    bool first = true;
    for (const auto& pp : pairs) {
        Biquad s{};
        s.a1 = -(pp[0] + pp[1]).real();
        s.a2 = (pp[0] * pp[1]).real();
        const double z0 = zero_pair[0], z1 = zero_pair[1];
        s.b0 = 1.0;
        s.b1 = -(z0 + z1);
        s.b2 = z0 * z1;
        if (first) {
            s.b0 *= gain;
            s.b1 *= gain;
            s.b2 *= gain;
            first = false;
        }
        sections.push_back(s);
    }
    return sections;
}

void check_stability(const BiquadCascade& f) {
    for (const Biquad& s : f.sections) {
        // poles of z^2 + a1 z + a2 must be inside the unit circle
        const cplx disc = std::sqrt(cplx(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
        const cplx p0 = (-s.a1 + disc) / 2.0;
        const cplx p1 = (-s.a1 - disc) / 2.0;
        if (std::abs(p0) >= 1.0 || std::abs(p1) >= 1.0)
            throw_numeric("filter design produced an unstable section");
    }
}

}  // namespace

BiquadCascade design_butter_bandpass(int order, double low_hz, double high_hz, double fs) {
    if (order < 2 || order % 2 != 0)
        throw_config("design_butter_bandpass: order must be even and >= 2, got " +
                     std::to_string(order));
    if (!(0.0 < low_hz && low_hz < high_hz && high_hz < fs / 2.0))
        throw_config("design_butter_bandpass: need 0 < low < high < fs/2, got low=" +
                     std::to_string(low_hz) + " high=" + std::to_string(high_hz) +
                     " fs=" + std::to_string(fs));

    const int n = order / 2;  // analog lowpass prototype order
    const double k = 2.0 * fs;
    const double wl = k * std::tan(kPi * low_hz / fs);  // pre-warped edges
    const double wh = k * std::tan(kPi * high_hz / fs);
    const double w0sq = wl * wh;
    const double bw = wh - wl;

    // lowpass -> bandpass: each prototype pole p maps to the two roots of
    // s^2 - p*bw*s + w0^2 = 0; N zeros appear at s = 0.
    std::vector<cplx> apoles;
    apoles.reserve(2 * n);
    for (const cplx& p : prototype_poles(n)) {
        const cplx half = p * (bw / 2.0);
        const cplx root = std::sqrt(half * half - w0sq);
        apoles.push_back(half + root);
        apoles.push_back(half - root);
    }

    // bilinear transform; gain matching at the mapped point
    cplx denom(1.0, 0.0);
    std::vector<cplx> dpoles;
    dpoles.reserve(apoles.size());
    for (const cplx& p : apoles) {
        dpoles.push_back(bilinear(p, k));
        denom *= (k - p);
    }
    const double ka = std::pow(bw, n);
    const double kd = ka * (std::pow(k, n) / denom).real();

    BiquadCascade out;
    out.design = {order, low_hz, high_hz, fs};
    out.sections = make_sections(std::move(dpoles), {1.0, -1.0}, kd);
    check_stability(out);
    return out;
}

BiquadCascade design_butter_lowpass(int order, double cutoff_hz, double fs) {
    if (order < 2 || order % 2 != 0)
        throw_config("design_butter_lowpass: order must be even and >= 2, got " +
                     std::to_string(order));
    if (!(0.0 < cutoff_hz && cutoff_hz < fs / 2.0))
        throw_config("design_butter_lowpass: need 0 < cutoff < fs/2");

    const double k = 2.0 * fs;
    const double wc = k * std::tan(kPi * cutoff_hz / fs);

    std::vector<cplx> dpoles;
    cplx denom(1.0, 0.0);
    for (const cplx& p : prototype_poles(order)) {
        const cplx ap = p * wc;
        dpoles.push_back(bilinear(ap, k));
        denom *= (k - ap);
    }
    const double kd = (std::pow(wc, order) / denom).real();

    BiquadCascade out;
    out.design = {order, 0.0, cutoff_hz, fs};
    out.sections = make_sections(std::move(dpoles), {-1.0, -1.0}, kd);
    check_stability(out);
    return out;
}

std::complex<double> frequency_response(const BiquadCascade& filter, double f_hz) {
    const cplx zinv = std::exp(cplx(0.0, -2.0 * kPi * f_hz / filter.design.fs));
    cplx h(1.0, 0.0);
    for (const Biquad& s : filter.sections)
        h *= (s.b0 + s.b1 * zinv + s.b2 * zinv * zinv) /
             (1.0 + s.a1 * zinv + s.a2 * zinv * zinv);
    return h;
}

namespace {

// One pass of the cascade, direct form II transposed, with per-section
// steady-state initial conditions scaled by the first input sample.
void run_cascade(const BiquadCascade& f, std::vector<double>& x) {
    double carry_dc = 1.0;  // DC gain of the sections already applied
    const double x0 = x.empty() ? 0.0 : x.front();
    for (const Biquad& s : f.sections) {
        const double denom = 1.0 + s.a1 + s.a2;
        const double gdc = (denom != 0.0) ? (s.b0 + s.b1 + s.b2) / denom : 0.0;
        const double scale = x0 * carry_dc;
        double s2 = (s.b2 - s.a2 * gdc) * scale;
        double s1 = (s.b1 - s.a1 * gdc) * scale + s2;
        for (double& v : x) {
            const double y = s.b0 * v + s1;
            s1 = s.b1 * v - s.a1 * y + s2;
            s2 = s.b2 * v - s.a2 * y;
            v = y;
        }
        carry_dc *= gdc;
    }
}

}  // namespace

std::vector<double> filtfilt(const BiquadCascade& filter, std::span<const double> signal) {
    const int order = filter.design.order;
    const std::size_t pad = static_cast<std::size_t>(3 * order);
    if (signal.size() <= 3 * static_cast<std::size_t>(order))
        throw_invalid("filtfilt: signal length " + std::to_string(signal.size()) +
                      " too short for order-" + std::to_string(order) + " filter");

    const std::size_t n = signal.size();
    std::vector<double> ext(n + 2 * pad);
    // odd reflection about both end points
    for (std::size_t i = 0; i < pad; ++i)
        ext[i] = 2.0 * signal[0] - signal[pad - i];
    std::copy(signal.begin(), signal.end(), ext.begin() + pad);
    for (std::size_t i = 0; i < pad; ++i)
        ext[pad + n + i] = 2.0 * signal[n - 1] - signal[n - 2 - i];

    run_cascade(filter, ext);
    std::reverse(ext.begin(), ext.end());
    run_cascade(filter, ext);
    std::reverse(ext.begin(), ext.end());

    return std::vector<double>(ext.begin() + pad, ext.begin() + pad + n);
}

RealMatrix filtfilt_rows(const BiquadCascade& filter, const RealMatrix& data) {
    if (data.cols() <= 3 * static_cast<Index>(filter.design.order))
        throw_invalid("filtfilt: signal length " + std::to_string(data.cols()) +
                      " too short for order-" + std::to_string(filter.design.order) +
                      " filter");
    RealMatrix out(data.rows(), data.cols());
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < data.rows(); ++r) {
        std::vector<double> row(data.cols());
        Eigen::Map<RealVector>(row.data(), data.cols()) = data.row(r);
        std::vector<double> filtered = filtfilt(filter, row);
        out.row(r) = Eigen::Map<const RealVector>(filtered.data(), data.cols());
    }
    return out;
}

ContinuousRecording decimate(const ContinuousRecording& recording, double target_fs) {
    if (target_fs <= 0.0) throw_config("decimate: target_fs must be positive");
    const double ratio = recording.fs / target_fs;
    const Index factor = static_cast<Index>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(factor)) > 1e-9 || factor < 1)
        throw_invalid("decimate: fs " + std::to_string(recording.fs) +
                      " is not an integer multiple of target " + std::to_string(target_fs));
    if (factor == 1) return recording;

    const BiquadCascade aa = design_butter_lowpass(8, 0.45 * target_fs, recording.fs);
    RealMatrix filtered = filtfilt_rows(aa, recording.samples);

    const Index t_new = (recording.samples.cols() + factor - 1) / factor;
    ContinuousRecording out;
    out.n_channels = recording.n_channels;
    out.fs = target_fs;
    out.samples.resize(recording.n_channels, t_new);
    for (Index j = 0; j < t_new; ++j) out.samples.col(j) = filtered.col(j * factor);
    out.markers = recording.markers;
    for (Marker& m : out.markers) m.sample /= factor;
    return out;
}

RealMatrix common_average_reference(const RealMatrix& data) {
    if (data.rows() < 2)
        throw_invalid("common_average_reference: need at least 2 channels");
    return data.rowwise() - data.colwise().mean();
}

Epoch common_average_reference(const Epoch& epoch) {
    Epoch out = epoch;
    out.data = common_average_reference(epoch.data);
    return out;
}

ContinuousRecording common_average_reference(const ContinuousRecording& recording) {
    ContinuousRecording out = recording;
    out.samples = common_average_reference(recording.samples);
    return out;
}

EpochSet epoch_stream(const ContinuousRecording& recording, double window_s,
                      bool drop_trial_end) {
    const Index t = static_cast<Index>(std::llround(window_s * recording.fs));
    if (t < 2) throw_invalid("epoch_stream: window too short");

    EpochSet out;
    out.fs = recording.fs;
    out.n_channels = recording.n_channels;
    for (std::size_t i = 0; i < recording.markers.size(); ++i) {
        const Marker& m = recording.markers[i];
        if (drop_trial_end && m.trial_end) continue;
        if (m.sample + t > recording.samples.cols())
            throw_invalid("epoch_stream: window for marker " + std::to_string(i) +
                          " at sample " + std::to_string(m.sample) +
                          " overruns the recording");
        Epoch e;
        e.data = recording.samples.middleCols(m.sample, t);
        e.label = m.label;
        e.fs = recording.fs;
        out.epochs.push_back(std::move(e));
    }
    return out;
}

EpochSet balance_classes(const EpochSet& set, std::uint64_t seed) {
    std::vector<std::size_t> idx1, idx2;
    for (std::size_t i = 0; i < set.epochs.size(); ++i)
        (set.epochs[i].label == 1 ? idx1 : idx2).push_back(i);
    if (idx1.empty() || idx2.empty())
        throw_invalid("balance_classes: both classes must be present");

    auto& majority = idx1.size() >= idx2.size() ? idx1 : idx2;
    const std::size_t target = std::min(idx1.size(), idx2.size());

    if (majority.size() > target) {
        std::mt19937_64 rng(seed);
        // partial Fisher-Yates: first `target` entries are a uniform sample
        for (std::size_t i = 0; i < target; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, majority.size() - 1);
            std::swap(majority[i], majority[pick(rng)]);
        }
        majority.resize(target);
        std::sort(majority.begin(), majority.end());
    }

    std::vector<std::size_t> keep;
    keep.reserve(2 * target);
    keep.insert(keep.end(), idx1.begin(), idx1.end());
    keep.insert(keep.end(), idx2.begin(), idx2.end());
    std::sort(keep.begin(), keep.end());

    EpochSet out;
    out.fs = set.fs;
    out.n_channels = set.n_channels;
    out.epochs.reserve(keep.size());
    for (std::size_t i : keep) out.epochs.push_back(set.epochs[i]);
    return out;
}

EpochSet bandpass_epochs(const EpochSet& set, double low_hz, double high_hz, int order) {
    const BiquadCascade band = design_butter_bandpass(order, low_hz, high_hz, set.fs);
    if (set.n_samples() <= 3 * static_cast<Index>(order))
        throw_invalid("bandpass_epochs: epochs too short for the filter");
    EpochSet out = set;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < out.epochs.size(); ++i) {
        out.epochs[i].data = filtfilt_rows(band, out.epochs[i].data);
        out.epochs[i].data.colwise() -= out.epochs[i].data.rowwise().mean().eval();
    }
    return out;
}

EpochSet preprocess_pipeline(const ContinuousRecording& recording,
                             const PipelineConfig& config) {
    ContinuousRecording rec = decimate(recording, config.target_fs);
    const BiquadCascade band =
        design_butter_bandpass(config.filter_order, config.low_hz, config.high_hz, rec.fs);

    if (config.order == PipelineOrder::FilterThenEpoch) {
        if (config.car) rec = common_average_reference(rec);
        rec.samples = filtfilt_rows(band, rec.samples);
        EpochSet set = epoch_stream(rec, config.window_s, config.drop_trial_end);
        // the bandpass removes DC from the stream, not from each finite
        // window; drop the residual window mean so epochs are zero-mean
        for (Epoch& e : set.epochs)
            e.data.colwise() -= e.data.rowwise().mean().eval();
        return set;
    }

    EpochSet set = epoch_stream(rec, config.window_s, config.drop_trial_end);
    if (config.car && set.n_channels < 2)
        throw_invalid("common_average_reference: need at least 2 channels");
    if (!set.epochs.empty() &&
        set.epochs.front().data.cols() <= 3 * static_cast<Index>(config.filter_order))
        throw_invalid("preprocess_pipeline: epoch window too short for the bandpass filter");
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < set.epochs.size(); ++i) {
        Epoch& e = set.epochs[i];
        if (config.car) e.data = common_average_reference(e.data);
        e.data = filtfilt_rows(band, e.data);
        e.data.colwise() -= e.data.rowwise().mean().eval();
    }
    return set;
}

}  // namespace sacsp
