#pragma once

#include <vector>

#include "sacsp/linalg.hpp"
#include "sacsp/types.hpp"

namespace sacsp {

/// Per-DFT-bin weight vector (the spectral filter). Learned weights are
/// nonnegative, unit l2 norm and conjugate-symmetric across bins; the fixed
/// cosine weights used by the CCACSP reduction carry negative entries at
/// high bins and are exempt from the nonnegativity check.
struct SpectralWeights {
    RealVector weights;  // length t
    double fs = 0.0;

    Index size() const { return weights.size(); }
};

/// Nonnegative per-bin power of a spatially filtered signal,
/// power[k] = E[|w^T xhat_k|^2] with E the time-averaged segment mean.
struct BinPowerVector {
    RealVector power;  // length t
};

/// Cached training statistics shared by every covariance-weighted operation.
///
/// All expectations follow the time-average convention: sigma = E[X X^T]
/// divides by the sample count, and the spectral statistics divide by the
/// segment length, so that uniform unit-norm weights reduce the weighted
/// covariance to sigma / sqrt(t) exactly under the unitary DFT.
///
/// Epochs longer than one second are split into non-overlapping 1 s segments;
/// spectra are stored per segment. bin_cov caches the segment-averaged
/// per-bin real outer products E[Re(xhat_k xhat_k^H)], which makes every
/// weighted covariance and bin power a cheap contraction. Immutable after
/// construction and safe to share across threads.
struct TrainStats {
    RealMatrix sigma1, sigma2;                     // n x n spatial covariances
    std::vector<ComplexMatrix> spectra1, spectra2; // n x t unitary spectra per segment
    std::vector<RealMatrix> bin_cov1, bin_cov2;    // t matrices of size n x n
    Index t = 0;
    double fs = 0.0;

    Index n() const { return sigma1.rows(); }
    const std::vector<ComplexMatrix>& spectra(int class_id) const;
    const std::vector<RealMatrix>& bin_cov(int class_id) const;
    const RealMatrix& sigma(int class_id) const;
};

/// Build covariances, per-segment spectra and the per-bin covariance stack.
TrainStats build_train_stats(const EpochSet& set);

/// Map statistics into the whitened subspace of a projector (spectra and
/// covariances transform by q on the left / q^T on the right).
TrainStats project_stats(const TrainStats& stats, const WhiteningProjector& projector);

/// Spectrally-weighted covariance E[Re(Xhat diag(h) Xhat^H)], symmetrized.
RealMatrix weighted_cov(const TrainStats& stats, int class_id, const SpectralWeights& w);

/// Per-bin power of the signal projected through spatial filter w.
BinPowerVector bin_power(const TrainStats& stats, int class_id, const RealVector& w);

/// Closed-form spectral update: the unit-norm weights maximizing
/// <h, power> subject to ||h||_2 <= 1, i.e. power / ||power||.
SpectralWeights update_weights(const BinPowerVector& power, double fs);

enum class InitKind { Uniform, MuBand, BetaBand };

/// Band-indicator initial weights (mu 7-15 Hz, beta 15-30 Hz, or all-pass),
/// mirrored across conjugate bins and l2-normalized.
SpectralWeights make_init_weights(InitKind kind, Index t, double fs);

/// Fixed cosine weights h(k) = cos(2 pi k / t); the spectral profile whose
/// weighted covariance equals the one-sample cyclic shift covariance.
SpectralWeights cosine_weights(Index t, double fs, bool unit_norm);

const char* to_string(InitKind kind);
InitKind init_kind_from_string(const std::string& name);

}  // namespace sacsp
