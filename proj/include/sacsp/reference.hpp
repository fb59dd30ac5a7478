#pragma once

#include "sacsp/spectral_cov.hpp"
#include "sacsp/synth.hpp"
#include "sacsp/types.hpp"

// Serial reference implementations. These are straight transcriptions of the
// defining formulas (naive loops, direct summation), kept independent of the
// optimized kernels so tests can compare the two and the benchmark can
// measure the gap. Assumes epochs no longer than one segment.
namespace sacsp::reference {

/// O(t^2) DFT by direct evaluation of the transform sum, unitary scale.
ComplexMatrix naive_dft(const RealMatrix& epoch);

/// Direct-sum spatial covariance of one class: sum X X^T / (t * count).
RealMatrix class_covariance_direct(const EpochSet& set, int class_id);

/// Spectrally-weighted covariance from raw epochs by per-epoch complex
/// arithmetic: mean over epochs of Re(Xhat diag(h) Xhat^H) / t.
RealMatrix weighted_cov_direct(const EpochSet& set, int class_id, const RealVector& h);

/// Per-bin filtered power from raw epochs: mean |w^T xhat_k|^2 / t.
RealVector bin_power_direct(const EpochSet& set, int class_id, const RealVector& w);

/// Time-domain cyclic-shift covariance (1/2) E[X (S + S^T) X^T] with S the
/// one-sample cyclic shift; equals the cosine-weighted covariance.
RealMatrix cyclic_shift_cov_direct(const EpochSet& set, int class_id);

/// Serial twin of synth::generate (same per-epoch streams, plain loop).
EpochSet generate_serial(const SynthSpec& spec);

/// Serial twin of build_train_stats (plain loops, no slot reduction).
TrainStats build_train_stats_serial(const EpochSet& set);

}  // namespace sacsp::reference
