#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sacsp/classify.hpp"
#include "sacsp/preprocess.hpp"
#include "sacsp/reference.hpp"
#include "sacsp/synth.hpp"
#include "test_util.hpp"

using namespace sacsp;
using namespace sacsp::testutil;

namespace {

// Minimal bank with externally chosen filters, for feature-map tests.
TrainedFilterBank manual_bank(std::vector<FilterPair> pairs, Index t, double fs) {
    TrainedFilterBank bank;
    bank.pairs = std::move(pairs);
    bank.t = t;
    bank.fs = fs;
    bank.algo_tag = "sacsp";
    return bank;
}

RealMatrix gaussian_samples(Index n, Index d, const RealMatrix& chol_cov,
                            const RealVector& mean, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RealMatrix x(n, d);
    for (Index i = 0; i < n; ++i) {
        RealVector z(d);
        for (Index j = 0; j < d; ++j) z(j) = gauss(rng);
        x.row(i) = (mean + chol_cov * z).transpose();
    }
    return x;
}

}  // namespace

TEST_CASE("features with uniform weights equal CSP log-variance minus log sqrt(t)") {
    const EpochSet set = random_epoch_set(4, 100, 20, 42);
    const TrainedFilterBank bank = train_csp(set, 2);
    const Epoch& epoch = set.epochs[3];
    const FeatureVector f = extract_features(bank, epoch);
    for (std::size_t r = 0; r < bank.pairs.size(); ++r) {
        const RealVector& w = bank.pairs[r].spatial;
        const double variance =
            (w.transpose() * epoch.data).squaredNorm() / 100.0;
        CHECK(f.values(static_cast<Index>(r)) ==
              doctest::Approx(std::log(variance) - std::log(10.0)).epsilon(1e-10));
    }
}

TEST_CASE("features shift by 2 ln c under epoch scaling") {
    const EpochSet set = random_epoch_set(4, 100, 4, 77);
    const TrainedFilterBank bank = train_csp(set, 2);
    Epoch scaled = set.epochs[0];
    scaled.data *= 3.0;
    const FeatureVector a = extract_features(bank, set.epochs[0]);
    const FeatureVector b = extract_features(bank, scaled);
    for (Index i = 0; i < a.values.size(); ++i)
        CHECK(b.values(i) - a.values(i) ==
              doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("one-hot spectral weight feature matches direct complex arithmetic") {
    const EpochSet set = random_epoch_set(5, 100, 2, 99);
    const Epoch& epoch = set.epochs[0];
    const RealVector w = random_unit(5, 12);

    RealVector h = RealVector::Zero(100);
    h(10) = 1.0 / std::sqrt(2.0);
    h(90) = 1.0 / std::sqrt(2.0);  // mirror bin

    FilterPair pair;
    pair.spatial = w;
    pair.spectral = SpectralWeights{h, 100.0};
    pair.class_id = 1;
    const TrainedFilterBank bank = manual_bank({pair}, 100, 100.0);

    const ComplexMatrix xhat = reference::naive_dft(epoch.data);
    const std::complex<double> proj10 = w.cast<std::complex<double>>().dot(xhat.col(10));
    const std::complex<double> proj90 = w.cast<std::complex<double>>().dot(xhat.col(90));
    const double direct = std::log(
        (h(10) * std::norm(proj10) + h(90) * std::norm(proj90)) / 100.0);

    const FeatureVector f = extract_features(bank, epoch);
    CHECK(f.values(0) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("multi-second epochs segment-average the statistics before the log") {
    const EpochSet set = random_epoch_set(3, 200, 2, 5, 100.0);  // 2 s epochs
    const TrainedFilterBank bank = train_csp(set, 1);
    CHECK(bank.t == 100);
    const Epoch& epoch = set.epochs[0];
    const FeatureVector f = extract_features(bank, epoch);

    const RealVector& w = bank.pairs[0].spatial;
    const double v1 = (w.transpose() * epoch.data.leftCols(100)).squaredNorm() / 100.0;
    const double v2 = (w.transpose() * epoch.data.rightCols(100)).squaredNorm() / 100.0;
    const double expected = std::log(0.5 * (v1 + v2) / 10.0);
    CHECK(f.values(0) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("ledoit_wolf degenerate conventions") {
    RealMatrix same(5, 3);
    for (Index i = 0; i < 5; ++i) same.row(i) << 1.0, 2.0, 3.0;
    auto [cov_same, gamma_same] = ledoit_wolf_covariance(same);
    CHECK(gamma_same == 1.0);

    const RealMatrix scalar = random_matrix(50, 1, 3);
    auto [cov_scalar, gamma_scalar] = ledoit_wolf_covariance(scalar);
    CHECK(gamma_scalar == 0.0);

    CHECK_THROWS_AS((void)ledoit_wolf_covariance(RealMatrix::Zero(1, 3)), Error);
}

TEST_CASE("ledoit_wolf gamma stays in [0,1] and shrinks toward the scaled identity") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Index n = 5 + static_cast<Index>(seed % 40);
        const Index d = 2 + static_cast<Index>(seed % 7);
        const RealMatrix x = random_matrix(n, d, 900 + seed);
        auto [cov, gamma] = ledoit_wolf_covariance(x);
        CHECK(gamma >= 0.0);
        CHECK(gamma <= 1.0);
        CHECK(cov.rows() == d);
        CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("ledoit_wolf beats the raw sample covariance most of the time") {
    // 500 samples from a known 6-dim covariance; Frobenius error of the
    // shrunk estimate must not exceed the raw estimate's in >= 90 of 100
    // seeded trials
    const Index d = 6, n = 500;
    RealVector eigs(d);
    for (Index i = 0; i < d; ++i)
        eigs(i) = 1.8 + 0.4 * static_cast<double>(i) / static_cast<double>(d - 1);
    const RealMatrix basis =
        Eigen::HouseholderQR<RealMatrix>(random_matrix(d, d, 1357) +
                                         4.0 * RealMatrix::Identity(d, d))
            .householderQ();
    const RealMatrix truth = basis * eigs.asDiagonal() * basis.transpose();
    const RealMatrix chol = Eigen::LLT<RealMatrix>(truth).matrixL();

    int wins = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const RealMatrix x =
            gaussian_samples(n, d, chol, RealVector::Zero(d), 5000 + trial);
        auto [shrunk, gamma] = ledoit_wolf_covariance(x);
        const RealVector mean = x.colwise().mean();
        const RealMatrix centered = x.rowwise() - mean.transpose();
        const RealMatrix raw = (centered.transpose() * centered) / static_cast<double>(n);
        if ((shrunk - truth).norm() <= (raw - truth).norm()) ++wins;
    }
    CHECK(wins >= 90);
}

TEST_CASE("lda separates well-separated spherical gaussians") {
    const Index d = 4;
    RealVector mu1 = RealVector::Zero(d), mu2 = RealVector::Zero(d);
    mu1(0) = 4.0;
    mu2(0) = -4.0;
    const RealMatrix x1 = gaussian_samples(60, d, RealMatrix::Identity(d, d), mu1, 1);
    const RealMatrix x2 = gaussian_samples(60, d, RealMatrix::Identity(d, d), mu2, 2);
    RealMatrix x(120, d);
    x << x1, x2;
    std::vector<int> labels(120, 1);
    for (int i = 60; i < 120; ++i) labels[static_cast<std::size_t>(i)] = 2;

    const LdaModel model = lda_train(x, labels);
    CHECK(std::abs(model.weights.normalized()(0)) > 0.95);
    int correct = 0;
    for (Index i = 0; i < 120; ++i) {
        const double v = model.weights.dot(x.row(i)) + model.bias;
        if ((v > 0.0 ? 1 : 2) == labels[static_cast<std::size_t>(i)]) ++correct;
    }
    CHECK(correct == 120);
}

TEST_CASE("lda on identical class distributions sits at chance") {
    const Index d = 3;
    const RealMatrix x = random_matrix(400, d, 888);
    std::vector<int> labels(400);
    for (int i = 0; i < 400; ++i) labels[static_cast<std::size_t>(i)] = (i % 2) + 1;
    const LdaModel model = lda_train(x, labels);

    const RealMatrix fresh = random_matrix(500, d, 889);
    int as_one = 0;
    for (Index i = 0; i < 500; ++i)
        if (model.weights.dot(fresh.row(i)) + model.bias > 0.0) ++as_one;
    const double frac = static_cast<double>(as_one) / 500.0;
    CHECK(frac > 0.35);
    CHECK(frac < 0.65);
}

TEST_CASE("lda matches the closed-form two-dimensional oracle at zero shrinkage") {
    // four points per class with exactly known sample covariance
    RealMatrix x(8, 2);
    const double a = 2.0, b = 1.0;
    RealVector mu1(2), mu2(2);
    mu1 << 1.0, 0.5;
    mu2 << -1.0, -0.5;
    x.row(0) = (mu1 + RealVector(RealVector::Zero(2))).transpose();
    x(0, 0) += a;
    x.row(1) = mu1.transpose();
    x(1, 0) -= a;
    x.row(2) = mu1.transpose();
    x(2, 1) += b;
    x.row(3) = mu1.transpose();
    x(3, 1) -= b;
    x.row(4) = mu2.transpose();
    x(4, 0) += a;
    x.row(5) = mu2.transpose();
    x(5, 0) -= a;
    x.row(6) = mu2.transpose();
    x(6, 1) += b;
    x.row(7) = mu2.transpose();
    x(7, 1) -= b;
    const std::vector<int> labels = {1, 1, 1, 1, 2, 2, 2, 2};

    // pooled covariance with 1/n normalization: diag(a^2/2, b^2/2)
    RealMatrix cov = RealMatrix::Zero(2, 2);
    cov(0, 0) = a * a / 2.0;
    cov(1, 1) = b * b / 2.0;
    const RealVector expected = cov.inverse() * (mu1 - mu2);

    const LdaModel model = lda_train(x, labels, 0.0);
    CHECK((model.weights - expected).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(model.bias == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(model.shrinkage_used == 0.0);
}

TEST_CASE("lda rejects degenerate inputs") {
    RealMatrix x = random_matrix(3, 2, 4);
    CHECK_THROWS_AS((void)lda_train(x, {1, 1, 2}), Error);  // one class-2 sample
    CHECK_THROWS_AS((void)lda_train(x, {1, 1}), Error);     // label count mismatch
}

TEST_CASE("predict classifies planted class-1 epochs with positive decisions") {
    SynthSpec spec = default_synth_spec(303);
    spec.sources[0].class1_amp = 2.5;
    spec.sources[0].class2_amp = 0.3;
    spec.noise_sigma = 0.3;
    const EpochSet train = bandpass_epochs(generate(spec), 7.0, 30.0);
    const SacspModel model = train_model(train, Algo::Sacsp, SacspConfig{});

    SynthSpec fresh_spec = spec;
    fresh_spec.seed = 404;
    const EpochSet fresh = bandpass_epochs(generate(fresh_spec), 7.0, 30.0);
    int hits = 0, total = 0;
    for (const Epoch& e : fresh.epochs) {
        if (e.label != 1) continue;
        ++total;
        const Prediction p = predict(model, e);
        if (p.label == 1 && p.decision_value > 0.0) ++hits;
    }
    CHECK(total == 68);
    CHECK(hits >= (9 * total) / 10);

    // determinism
    const Prediction p1 = predict(model, fresh.epochs[0]);
    const Prediction p2 = predict(model, fresh.epochs[0]);
    CHECK(p1.label == p2.label);
    CHECK(p1.decision_value == p2.decision_value);
}

TEST_CASE("predict tie convention and fingerprint check") {
    FilterPair pair;
    pair.spatial = RealVector::Ones(2).normalized();
    pair.spectral = make_init_weights(InitKind::Uniform, 16, 16.0);
    pair.class_id = 1;

    SacspModel model;
    model.bank = manual_bank({pair}, 16, 16.0);
    model.lda.weights = RealVector::Zero(1);
    model.lda.bias = 0.0;
    model.fingerprint = {16.0, 7.0, 30.0, 16};

    Epoch e;
    e.data = random_matrix(2, 16, 6);
    e.label = 1;
    e.fs = 16.0;
    const Prediction p = predict(model, e);
    CHECK(p.decision_value == 0.0);
    CHECK(p.label == 2);  // ties go to class 2

    Epoch bad = e;
    bad.fs = 100.0;
    CHECK_THROWS_AS((void)predict(model, bad), Error);
}

TEST_CASE("joint rescaling of train and test leaves decisions unchanged") {
    SynthSpec spec = default_synth_spec(1212);
    const EpochSet train = bandpass_epochs(generate(spec), 7.0, 30.0);
    EpochSet train_scaled = train;
    for (Epoch& e : train_scaled.epochs) e.data *= 4.0;

    const SacspModel m1 = train_model(train, Algo::Csp, SacspConfig{});
    const SacspModel m2 = train_model(train_scaled, Algo::Csp, SacspConfig{});

    SynthSpec fresh_spec = spec;
    fresh_spec.seed = 1213;
    const EpochSet fresh = bandpass_epochs(generate(fresh_spec), 7.0, 30.0);
    for (std::size_t i = 0; i < 20; ++i) {
        Epoch scaled = fresh.epochs[i];
        scaled.data *= 4.0;
        CHECK(predict(m1, fresh.epochs[i]).label == predict(m2, scaled).label);
    }
}
