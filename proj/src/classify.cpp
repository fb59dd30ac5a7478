#include "sacsp/classify.hpp"

#include <cmath>

namespace sacsp {

FeatureVector extract_features(const TrainedFilterBank& bank, const Epoch& epoch) {
    const Index n = epoch.data.rows();
    const Index t_epoch = epoch.data.cols();
    if (bank.pairs.empty()) throw_invalid("extract_features: empty filter bank");
    if (bank.pairs.front().spatial.size() != n)
        throw_invalid("extract_features: epoch has " + std::to_string(n) +
                      " channels, bank expects " +
                      std::to_string(bank.pairs.front().spatial.size()));

    const Index t_seg = bank.t;
    if (t_epoch != t_seg && (t_epoch < t_seg || t_epoch % t_seg != 0))
        throw_invalid("extract_features: epoch length " + std::to_string(t_epoch) +
                      " is not a multiple of the bank segment length " +
                      std::to_string(t_seg));
    const Index segs = t_epoch / t_seg;

    const DftPlan plan(t_seg);
    FeatureVector out;
    out.values.resize(static_cast<Index>(bank.pairs.size()));

    for (std::size_t r = 0; r < bank.pairs.size(); ++r) {
        const FilterPair& pair = bank.pairs[r];
        double acc = 0.0;
        for (Index g = 0; g < segs; ++g) {
            // project first, then transform the single filtered row
            RealMatrix y = pair.spatial.transpose() * epoch.data.middleCols(g * t_seg, t_seg);
            const ComplexMatrix yhat = plan.forward(y);
            double q = 0.0;
            for (Index k = 0; k < t_seg; ++k)
                q += pair.spectral.weights(k) * std::norm(yhat(0, k));
            acc += q / static_cast<double>(t_seg);
        }
        acc /= static_cast<double>(segs);
        if (!(acc >= 0.0))  // negative or NaN
            throw_numeric("extract_features: non-positive band power for filter " +
                          std::to_string(r));
        out.values(static_cast<Index>(r)) = std::log(std::max(acc, 1e-300));
    }
    return out;
}

std::pair<RealMatrix, double> ledoit_wolf_covariance(const RealMatrix& samples) {
    const Index n = samples.rows();
    const Index d = samples.cols();
    if (n < 2) throw_invalid("ledoit_wolf_covariance: need at least 2 samples");

    const RealVector mean = samples.colwise().mean();
    const RealMatrix x = samples.rowwise() - mean.transpose();
    const RealMatrix s = (x.transpose() * x) / static_cast<double>(n);
    const double mu = s.trace() / static_cast<double>(d);

    double gamma;
    if (d == 1) {
        gamma = 0.0;  // scalar variance needs no shrinkage
    } else {
        const RealMatrix target_diff = s - mu * RealMatrix::Identity(d, d);
        const double delta = target_diff.squaredNorm() / static_cast<double>(d);
        if (delta <= 0.0) {
            gamma = 1.0;  // zero scatter: fall back to the spherical target
        } else {
            double beta_sum = 0.0;
            for (Index i = 0; i < n; ++i) {
                const RealVector xi = x.row(i);
                beta_sum += (xi * xi.transpose() - s).squaredNorm();
            }
            const double beta =
                beta_sum / (static_cast<double>(n) * static_cast<double>(n) *
                            static_cast<double>(d));
            gamma = std::clamp(std::min(beta, delta) / delta, 0.0, 1.0);
        }
    }

    RealMatrix shrunk =
        (1.0 - gamma) * s + gamma * mu * RealMatrix::Identity(d, d);
    return {std::move(shrunk), gamma};
}

LdaModel lda_train(const RealMatrix& features, const std::vector<int>& labels,
                   std::optional<double> force_shrinkage) {
    const Index n = features.rows();
    const Index d = features.cols();
    if (static_cast<Index>(labels.size()) != n)
        throw_invalid("lda_train: label count does not match feature rows");

    Index n1 = 0, n2 = 0;
    for (int l : labels) (l == 1 ? n1 : n2) += 1;
    if (n1 < 2 || n2 < 2)
        throw_invalid("lda_train: need at least 2 samples per class");

    RealVector mu1 = RealVector::Zero(d), mu2 = RealVector::Zero(d);
    for (Index i = 0; i < n; ++i)
        (labels[i] == 1 ? mu1 : mu2) += features.row(i).transpose();
    mu1 /= static_cast<double>(n1);
    mu2 /= static_cast<double>(n2);

    RealMatrix residuals(n, d);
    for (Index i = 0; i < n; ++i)
        residuals.row(i) =
            features.row(i) - (labels[i] == 1 ? mu1 : mu2).transpose();

    RealMatrix cov;
    double gamma;
    if (force_shrinkage) {
        gamma = std::clamp(*force_shrinkage, 0.0, 1.0);
        const RealMatrix s = (residuals.transpose() * residuals) / static_cast<double>(n);
        cov = (1.0 - gamma) * s +
              gamma * (s.trace() / static_cast<double>(d)) * RealMatrix::Identity(d, d);
    } else {
        std::tie(cov, gamma) = ledoit_wolf_covariance(residuals);
    }

    Eigen::LDLT<RealMatrix> solver(cov);
    if (solver.info() != Eigen::Success || !solver.isPositive())
        throw_numeric("lda_train: pooled covariance is singular after shrinkage");

    LdaModel model;
    model.weights = solver.solve(mu1 - mu2);
    model.bias = -0.5 * model.weights.dot(mu1 + mu2);
    model.shrinkage_used = gamma;
    model.class_means.resize(2, d);
    model.class_means.row(0) = mu1.transpose();
    model.class_means.row(1) = mu2.transpose();
    if (!model.weights.allFinite() || model.weights.norm() == 0.0)
        throw_numeric("lda_train: degenerate discriminant weights");
    return model;
}

Prediction predict(const SacspModel& model, const Epoch& epoch) {
    if (epoch.fs != model.fingerprint.fs)
        throw_invalid("predict: epoch sampling rate " + std::to_string(epoch.fs) +
                      " does not match model fingerprint " +
                      std::to_string(model.fingerprint.fs));
    if (epoch.data.cols() % model.fingerprint.t != 0)
        throw_invalid("predict: epoch length incompatible with model segment length");

    const FeatureVector f = extract_features(model.bank, epoch);
    const double v = model.lda.weights.dot(f.values) + model.lda.bias;
    return {v > 0.0 ? 1 : 2, v};
}

const char* to_string(Algo algo) {
    switch (algo) {
        case Algo::Csp: return "csp";
        case Algo::Ccacsp: return "ccacsp";
        case Algo::Sacsp: return "sacsp";
    }
    return "sacsp";
}

Algo algo_from_string(const std::string& name) {
    if (name == "csp") return Algo::Csp;
    if (name == "ccacsp") return Algo::Ccacsp;
    if (name == "sacsp") return Algo::Sacsp;
    throw_config("unknown algorithm '" + name + "' (expected csp|ccacsp|sacsp)");
}

SacspModel train_model(const EpochSet& set, Algo algo, const SacspConfig& config,
                       double band_low_hz, double band_high_hz) {
    SacspModel model;
    switch (algo) {
        case Algo::Csp:
            model.bank = train_csp(set, config.r_filters, config.whiten_threshold);
            break;
        case Algo::Ccacsp:
            model.bank = train_ccacsp(set, config.r_filters, config.whiten_threshold);
            break;
        case Algo::Sacsp:
            model.bank = train_sacsp(set, config);
            break;
    }
    model.config = config;
    model.fingerprint = {set.fs, band_low_hz, band_high_hz, model.bank.t};

    RealMatrix features(static_cast<Index>(set.epochs.size()),
                        static_cast<Index>(model.bank.pairs.size()));
    std::vector<int> labels(set.epochs.size());
    std::optional<Error> failure;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < set.epochs.size(); ++i) {
        try {
            features.row(static_cast<Index>(i)) =
                extract_features(model.bank, set.epochs[i]).values.transpose();
            labels[i] = set.epochs[i].label;
        } catch (const Error& e) {
#pragma omp critical
            if (!failure) failure = e;
        }
    }
    if (failure) throw *failure;
    model.lda = lda_train(features, labels);
    return model;
}

}  // namespace sacsp
