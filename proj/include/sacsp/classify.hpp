#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sacsp/algorithms.hpp"
#include "sacsp/types.hpp"

namespace sacsp {

struct FeatureVector {
    RealVector values;  // length 2R, log band power per filter pair
};

struct LdaModel {
    RealVector weights;
    double bias = 0.0;
    double shrinkage_used = 0.0;  // in [0,1]
    RealMatrix class_means;       // 2 x d, row 0 = class 1
};

struct PreprocFingerprint {
    double fs = 0.0;
    double low_hz = 0.0;
    double high_hz = 0.0;
    Index t = 0;
};

/// End-to-end bundle: trained filter bank plus fitted classifier.
struct SacspModel {
    TrainedFilterBank bank;
    LdaModel lda;
    PreprocFingerprint fingerprint;
    SacspConfig config;
};

/// Log band power per filter pair: ln(f_z^T (xhat diag(f_q) xhat^H) f_z)
/// under the time-averaged expectation; multi-second epochs average the
/// quadratic statistics over 1 s segments before the log.
FeatureVector extract_features(const TrainedFilterBank& bank, const Epoch& epoch);

/// Ledoit-Wolf shrinkage covariance of row-observation samples:
/// (1-gamma) S + gamma (tr S / d) I with the analytically optimal gamma.
/// Degenerate conventions: zero scatter -> gamma = 1; d = 1 -> gamma = 0.
std::pair<RealMatrix, double> ledoit_wolf_covariance(const RealMatrix& samples);

/// Binary shrinkage-LDA with equal priors on the pooled within-class
/// covariance. force_shrinkage overrides the Ledoit-Wolf coefficient
/// (test hook and reproducibility aid).
LdaModel lda_train(const RealMatrix& features, const std::vector<int>& labels,
                   std::optional<double> force_shrinkage = std::nullopt);

struct Prediction {
    int label = 0;          // 1 if the decision value is > 0, else 2
    double decision_value = 0.0;
};

Prediction predict(const SacspModel& model, const Epoch& epoch);

enum class Algo { Csp, Ccacsp, Sacsp };

const char* to_string(Algo algo);
Algo algo_from_string(const std::string& name);

/// Train the filter bank of the requested algorithm plus its LDA on the
/// features of the training epochs.
SacspModel train_model(const EpochSet& set, Algo algo, const SacspConfig& config,
                       double band_low_hz = 7.0, double band_high_hz = 30.0);

}  // namespace sacsp
