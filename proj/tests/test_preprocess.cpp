#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sacsp/linalg.hpp"
#include "sacsp/preprocess.hpp"
#include "test_util.hpp"

using namespace sacsp;
using namespace sacsp::testutil;

namespace {

constexpr double kPi = std::numbers::pi;

double gain_db(const BiquadCascade& f, double hz) {
    return 20.0 * std::log10(std::abs(frequency_response(f, hz)));
}

std::vector<double> sinusoid(double hz, double fs, std::size_t n, double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j)
        x[j] = std::sin(2.0 * kPi * hz * static_cast<double>(j) / fs + phase);
    return x;
}

double rms(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

TEST_CASE("butterworth bandpass hits the paper's band edges") {
    const BiquadCascade f = design_butter_bandpass(6, 7.0, 30.0, 100.0);
    CHECK(f.sections.size() == 3);
    CHECK(gain_db(f, 7.0) == doctest::Approx(-3.0103).epsilon(0.5 / 3.0));
    CHECK(gain_db(f, 30.0) == doctest::Approx(-3.0103).epsilon(0.5 / 3.0));
    CHECK(std::abs(gain_db(f, std::sqrt(7.0 * 30.0))) < 1.0);
    CHECK(gain_db(f, 50.0 - 1e-9) <= -40.0);  // deep stopband at Nyquist
}

TEST_CASE("butterworth bandpass order-2 design") {
    const BiquadCascade f = design_butter_bandpass(2, 10.0, 20.0, 100.0);
    CHECK(f.sections.size() == 1);
    CHECK(std::abs(gain_db(f, std::sqrt(10.0 * 20.0))) < 0.2);
    CHECK(gain_db(f, 10.0) == doctest::Approx(-3.0103).epsilon(0.5 / 3.0));
}

TEST_CASE("butterworth sections are stable") {
    for (const BiquadCascade& f : {design_butter_bandpass(6, 7.0, 30.0, 100.0),
                                   design_butter_bandpass(2, 10.0, 20.0, 100.0),
                                   design_butter_lowpass(8, 45.0, 1000.0)}) {
        for (const Biquad& s : f.sections) {
            // |poles|^2 = a2 for conjugate pairs; both real roots inside the
            // unit circle imply |a2| < 1 and |a1| < 1 + a2
            CHECK(std::abs(s.a2) < 1.0);
            CHECK(std::abs(s.a1) < 1.0 + s.a2 + 1e-12);
        }
    }
}

TEST_CASE("butterworth design rejects bad parameters") {
    CHECK_THROWS_AS((void)design_butter_bandpass(5, 7.0, 30.0, 100.0), Error);
    CHECK_THROWS_AS((void)design_butter_bandpass(6, 30.0, 7.0, 100.0), Error);
    CHECK_THROWS_AS((void)design_butter_bandpass(6, 7.0, 60.0, 100.0), Error);
}

TEST_CASE("butterworth lowpass monotone rolloff") {
    const BiquadCascade f = design_butter_lowpass(8, 45.0, 1000.0);
    CHECK(std::abs(gain_db(f, 1.0)) < 0.01);
    CHECK(gain_db(f, 45.0) == doctest::Approx(-3.0103).epsilon(0.5 / 3.0));
    CHECK(gain_db(f, 90.0) < -40.0);
}

TEST_CASE("filtfilt zero stays zero") {
    const BiquadCascade f = design_butter_bandpass(6, 7.0, 30.0, 100.0);
    const std::vector<double> zeros(200, 0.0);
    for (double v : filtfilt(f, zeros)) CHECK(v == 0.0);
}

TEST_CASE("filtfilt passband sinusoid keeps phase and amplitude") {
    const BiquadCascade f = design_butter_bandpass(6, 7.0, 30.0, 100.0);
    const std::vector<double> x = sinusoid(15.0, 100.0, 300);
    const std::vector<double> y = filtfilt(f, x);
    REQUIRE(y.size() == x.size());

    // zero lag at the cross-correlation peak
    auto xcorr = [&](int lag) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const int k = static_cast<int>(j) + lag;
            if (k >= 0 && k < static_cast<int>(y.size())) s += x[j] * y[static_cast<std::size_t>(k)];
        }
        return s;
    };
    double best = -1e300;
    int best_lag = -99;
    for (int lag = -20; lag <= 20; ++lag) {
        const double c = xcorr(lag);
        if (c > best) {
            best = c;
            best_lag = lag;
        }
    }
    CHECK(best_lag == 0);

    // correlation > 0.999 outside the reflection transient (the reference
    // scipy implementation shows the same edge behavior at this length)
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t j = 40; j < x.size() - 40; ++j) {
        dot += x[j] * y[j];
        nx += x[j] * x[j];
        ny += y[j] * y[j];
    }
    CHECK(dot / std::sqrt(nx * ny) > 0.999);

    // phase at 15 Hz within 1 degree (projection onto the quadrature pair),
    // edges trimmed to ignore the reflection transient
    double cs = 0.0, sn = 0.0;
    for (std::size_t j = 40; j < x.size() - 40; ++j) {
        const double ang = 2.0 * kPi * 15.0 * static_cast<double>(j) / 100.0;
        cs += y[j] * std::cos(ang);
        sn += y[j] * std::sin(ang);
    }
    const double phase = std::atan2(cs, sn);  // input phase is 0 (pure sine)
    CHECK(std::abs(phase) * 180.0 / kPi < 1.0);
}

TEST_CASE("filtfilt stopband attenuation") {
    const BiquadCascade f = design_butter_bandpass(6, 7.0, 30.0, 100.0);
    const std::vector<double> x = sinusoid(2.0, 100.0, 300);
    const std::vector<double> y = filtfilt(f, x);
    CHECK(rms(y) < 0.05 * rms(x));
}

TEST_CASE("filtfilt rejects too-short signals") {
    const BiquadCascade f = design_butter_bandpass(6, 7.0, 30.0, 100.0);
    const std::vector<double> x(18, 1.0);
    CHECK_THROWS_AS((void)filtfilt(f, x), Error);
}

TEST_CASE("decimate by 10 suppresses aliases") {
    // a 65 Hz tone at 1000 Hz would alias to 35 Hz after decimation to
    // 100 Hz; the anti-alias lowpass must remove it (>= 40 dB)
    ContinuousRecording rec;
    rec.n_channels = 1;
    rec.fs = 1000.0;
    rec.samples.resize(1, 5000);
    for (Index j = 0; j < 5000; ++j)
        rec.samples(0, j) = std::sin(2.0 * kPi * 65.0 * static_cast<double>(j) / 1000.0);
    rec.markers = {{1000, 1, false}, {2500, 2, false}};

    const ContinuousRecording dec = decimate(rec, 100.0);
    CHECK(dec.fs == 100.0);
    CHECK(dec.samples.cols() == 500);
    CHECK(dec.markers[0].sample == 100);
    CHECK(dec.markers[1].sample == 250);

    std::vector<double> out(static_cast<std::size_t>(dec.samples.cols()) - 100);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = dec.samples(0, static_cast<Index>(j) + 50);  // skip edge transients
    const double in_rms = 1.0 / std::sqrt(2.0);
    CHECK(rms(out) < 0.01 * in_rms);                       // residual < 1%
    CHECK(20.0 * std::log10(in_rms / rms(out)) >= 40.0);   // >= 40 dB suppression
}

TEST_CASE("decimate keeps passband tones") {
    ContinuousRecording rec;
    rec.n_channels = 1;
    rec.fs = 500.0;
    rec.samples.resize(1, 5000);
    for (Index j = 0; j < 5000; ++j)
        rec.samples(0, j) = std::sin(2.0 * kPi * 10.0 * static_cast<double>(j) / 500.0);
    const ContinuousRecording dec = decimate(rec, 100.0);
    std::vector<double> out(dec.samples.cols());
    Eigen::Map<RealVector>(out.data(), dec.samples.cols()) = dec.samples.row(0);
    CHECK(rms(out) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("decimate identity when rates match") {
    ContinuousRecording rec;
    rec.n_channels = 2;
    rec.fs = 100.0;
    rec.samples = random_matrix(2, 256, 10);
    const ContinuousRecording out = decimate(rec, 100.0);
    CHECK((out.samples - rec.samples).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decimate rejects non-integer factors") {
    ContinuousRecording rec;
    rec.n_channels = 1;
    rec.fs = 250.0;
    rec.samples = RealMatrix::Zero(1, 1000);
    CHECK_THROWS_AS((void)decimate(rec, 100.0), Error);
}

TEST_CASE("decimate composes across factors on band-limited input") {
    // Hann-enveloped tone: smooth at the edges, so the reflection padding
    // excites no transient and the two routes agree to rounding
    ContinuousRecording rec;
    rec.n_channels = 1;
    rec.fs = 400.0;
    rec.samples.resize(1, 8000);
    for (Index j = 0; j < 8000; ++j) {
        const double env = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(j) / 7999.0);
        rec.samples(0, j) = env * std::sin(2.0 * kPi * 5.0 * static_cast<double>(j) / 400.0);
    }

    const ContinuousRecording once = decimate(rec, 100.0);
    const ContinuousRecording twice = decimate(decimate(rec, 200.0), 100.0);
    const Index t = std::min(once.samples.cols(), twice.samples.cols());
    double err = 0.0;
    for (Index j = 0; j < t; ++j)
        err += std::pow(once.samples(0, j) - twice.samples(0, j), 2);
    CHECK(std::sqrt(err / static_cast<double>(t)) < 1e-8);
}

TEST_CASE("common average reference") {
    RealVector a = random_unit(100, 77).transpose() * 5.0;
    RealMatrix two(2, 100);
    two.row(0) = a.transpose();
    two.row(1) = -a.transpose();
    CHECK((common_average_reference(two) - two).cwiseAbs().maxCoeff() < 1e-14);

    RealMatrix offs = RealMatrix::Constant(4, 50, 3.25);
    CHECK(common_average_reference(offs).cwiseAbs().maxCoeff() == 0.0);

    const RealMatrix x = random_matrix(64, 100, 909);
    const RealMatrix y = common_average_reference(x);
    CHECK(y.colwise().mean().cwiseAbs().maxCoeff() <= 1e-12);

    // rank drops by exactly one
    RealMatrix cov = y * y.transpose() / 100.0;
    cov = 0.5 * (cov + cov.transpose()).eval();
    const EigenPairs e = sym_eig(cov);
    CHECK(e.values(62) > 1e-6 * e.values(0));
    CHECK(e.values(63) < 1e-10 * e.values(0));

    // idempotent
    CHECK((common_average_reference(y) - y).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS((void)common_average_reference(RealMatrix::Zero(1, 10)), Error);
}

TEST_CASE("epoch_stream slices windows at markers") {
    ContinuousRecording rec;
    rec.n_channels = 3;
    rec.fs = 100.0;
    rec.samples = random_matrix(3, 1000, 31337);
    rec.markers = {{100, 1, false}, {400, 2, false}, {800, 1, true}};

    const EpochSet set = epoch_stream(rec, 1.0, true);
    REQUIRE(set.epochs.size() == 2);  // trial-end marker excluded
    CHECK(set.epochs[0].label == 1);
    CHECK(set.epochs[1].label == 2);
    CHECK((set.epochs[0].data - rec.samples.middleCols(100, 100)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((set.epochs[1].data - rec.samples.middleCols(400, 100)).cwiseAbs().maxCoeff() == 0.0);

    const EpochSet all = epoch_stream(rec, 1.0, false);
    CHECK(all.epochs.size() == 3);

    rec.markers.clear();
    CHECK(epoch_stream(rec, 1.0, true).epochs.empty());

    rec.markers = {{950, 1, false}};
    try {
        (void)epoch_stream(rec, 1.0, true);
        FAIL("expected epoching error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("marker 0") != std::string::npos);
    }
}

TEST_CASE("balance_classes subsamples the majority deterministically") {
    EpochSet set = random_epoch_set(2, 16, 70, 5150);
    // drop four class-2 epochs -> counts (70, 66)
    EpochSet uneven;
    uneven.fs = set.fs;
    uneven.n_channels = set.n_channels;
    int dropped = 0;
    for (const Epoch& e : set.epochs) {
        if (e.label == 2 && dropped < 4) {
            ++dropped;
            continue;
        }
        uneven.epochs.push_back(e);
    }
    REQUIRE(uneven.count(1) == 70);
    REQUIRE(uneven.count(2) == 66);

    const EpochSet balanced = balance_classes(uneven, 99);
    CHECK(balanced.count(1) == 66);
    CHECK(balanced.count(2) == 66);

    const EpochSet again = balance_classes(uneven, 99);
    REQUIRE(again.epochs.size() == balanced.epochs.size());
    for (std::size_t i = 0; i < again.epochs.size(); ++i)
        CHECK((again.epochs[i].data - balanced.epochs[i].data).cwiseAbs().maxCoeff() == 0.0);

    const EpochSet other = balance_classes(uneven, 100);
    bool any_diff = false;
    for (std::size_t i = 0; i < other.epochs.size(); ++i)
        if ((other.epochs[i].data - balanced.epochs[i].data).cwiseAbs().maxCoeff() != 0.0)
            any_diff = true;
    CHECK(any_diff);  // different seed picks a different subsample

    EpochSet even = random_epoch_set(2, 16, 50, 6);
    const EpochSet same = balance_classes(even, 1);
    CHECK(same.epochs.size() == 100);

    EpochSet one_class;
    one_class.fs = 100.0;
    one_class.n_channels = 2;
    one_class.epochs = {Epoch{RealMatrix::Zero(2, 16), 1, 100.0}};
    CHECK_THROWS_AS((void)balance_classes(one_class, 0), Error);
}

TEST_CASE("pipeline output epochs are zero-mean and order is configurable") {
    ContinuousRecording rec;
    rec.n_channels = 8;
    rec.fs = 200.0;
    rec.samples = random_matrix(8, 4000, 2024) * 10.0;
    rec.samples.array() += 100.0;  // big DC offset
    for (Index i = 0; i < 10; ++i)
        rec.markers.push_back({200 + i * 300, i % 2 == 0 ? 1 : 2, false});

    PipelineConfig cfg;
    cfg.target_fs = 100.0;
    const EpochSet set = preprocess_pipeline(rec, cfg);
    REQUIRE(set.epochs.size() == 10);
    CHECK(set.fs == 100.0);
    CHECK(set.epochs[0].data.cols() == 100);
    for (const Epoch& e : set.epochs) {
        for (Index c = 0; c < 8; ++c) {
            const double mean = e.data.row(c).mean();
            const double sd = std::sqrt(e.data.row(c).squaredNorm() / 100.0);
            CHECK(std::abs(mean) <= 1e-6 * sd);
        }
    }

    PipelineConfig alt = cfg;
    alt.order = PipelineOrder::FilterThenEpoch;
    const EpochSet set2 = preprocess_pipeline(rec, alt);
    CHECK(set2.epochs.size() == 10);
    // same shapes, different edge behavior
    CHECK(set2.epochs[0].data.rows() == set.epochs[0].data.rows());
    CHECK(set2.epochs[0].data.cols() == set.epochs[0].data.cols());
}

TEST_CASE("double filtfilt behaves like a squared-magnitude pass") {
    const BiquadCascade f = design_butter_bandpass(6, 7.0, 30.0, 100.0);
    // at 35 Hz the single filtfilt pass attenuates by |H|^2; a second pass
    // squares that again
    const std::vector<double> x = sinusoid(35.0, 100.0, 2000);
    const std::vector<double> y1 = filtfilt(f, x);
    const std::vector<double> y2 = filtfilt(f, y1);
    const double h2 = std::pow(std::abs(frequency_response(f, 35.0)), 2);
    const double mid_rms1 = rms(std::span<const double>(y1).subspan(500, 1000));
    const double mid_rms2 = rms(std::span<const double>(y2).subspan(500, 1000));
    CHECK(mid_rms1 == doctest::Approx(h2 / std::sqrt(2.0)).epsilon(0.05));
    CHECK(mid_rms2 == doctest::Approx(h2 * h2 / std::sqrt(2.0)).epsilon(0.05));
}
