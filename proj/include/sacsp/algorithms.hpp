#pragma once

#include <string>
#include <vector>

#include "sacsp/linalg.hpp"
#include "sacsp/spectral_cov.hpp"
#include "sacsp/types.hpp"

namespace sacsp {

/// One spatial filter coupled with its spectral weights. `spatial` lives in
/// the original channel space (back-projected through the whitening
/// projector) and satisfies w^T (Sigma1+Sigma2) w = 1 up to rounding.
struct FilterPair {
    RealVector spatial;
    SpectralWeights spectral;
    int class_id = 0;
    double objective = 0.0;  // final Rayleigh value
};

/// Objective log for one candidate's inner optimization loop.
struct OptTrace {
    int class_id = 0;
    int init_index = 0;    // m
    int eigvec_index = 0;  // r
    std::vector<double> objectives;  // value at init, then after each iteration
    bool hit_max_iters = false;
    bool selected = false;

    int iterations() const { return static_cast<int>(objectives.size()) - 1; }
};

struct TrainedFilterBank {
    std::vector<FilterPair> pairs;  // 2R: the R class-1 pairs then the R class-2 pairs
    WhiteningProjector projector;
    RealMatrix patterns;  // n x 2R, column j is the pattern of pairs[j]
    std::string algo_tag; // csp | ccacsp | sacsp
    std::vector<OptTrace> trace;
    Index t = 0;
    double fs = 0.0;
};

struct SacspConfig {
    int r_filters = 3;
    int m_inits = 3;
    double epsilon = 1e-6;
    int max_iters = 100;
    std::vector<InitKind> init_kinds = {InitKind::Uniform, InitKind::MuBand,
                                        InitKind::BetaBand};
    double whiten_threshold = 1e-9;
    // Diagnostic switch: freeze the spectral weights at their initialization
    // and skip the alternating loop, so the spatial filters are exactly the
    // top eigenvectors of the initial problem.
    bool disable_spectral_updates = false;

    void validate() const;
};

/// Rayleigh value w^T Gamma_c(h) w / w^T (Sigma1+Sigma2) w.
double objective(const TrainStats& stats, int class_id, const RealVector& w,
                 const SpectralWeights& h);

/// Classic CSP: generalized eigenproblem (Sigma1, Sigma1+Sigma2) solved in
/// whitened coordinates; class 1 takes the top r eigenvectors, class 2 the
/// bottom r. Spectral fields are uniform weights.
TrainedFilterBank train_csp(const EpochSet& set, int r_filters = 3,
                            double whiten_threshold = 1e-9);

/// CSP with fixed cosine spectral weights in the per-class numerators.
TrainedFilterBank train_ccacsp(const EpochSet& set, int r_filters = 3,
                               double whiten_threshold = 1e-9);

/// Joint spatial/spectral filter learning by alternating maximization:
/// closed-form spectral update against the leading generalized eigenvector,
/// run from m_inits initializations, keeping the top r_filters candidates
/// per class by final objective.
TrainedFilterBank train_sacsp(const EpochSet& set, const SacspConfig& config = {});

/// Spatial patterns Q^T (A^{-1})^T for a full whitened eigenvector matrix A.
RealMatrix compute_patterns(const EigenPairs& eigvecs_full,
                            const WhiteningProjector& projector);

}  // namespace sacsp
