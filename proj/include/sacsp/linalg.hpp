#pragma once

#include "sacsp/types.hpp"

namespace sacsp {

/// Eigendecomposition result; values sorted non-increasing, unit-norm column
/// vectors with the largest-magnitude entry made positive.
struct EigenPairs {
    RealVector values;
    RealMatrix vectors;  // column i pairs with values[i]
};

/// Q = Psi^{-1/2} L^T built from the retained eigenpairs of a PSD matrix,
/// so that q * sigma * q^T = I(rank).
struct WhiteningProjector {
    RealMatrix q;  // rank x n
    Index rank = 0;
    RealVector retained_eigenvalues;
};

/// Symmetric eigendecomposition with descending eigenvalues.
/// Input must be square and symmetric within 1e-10 relative asymmetry.
EigenPairs sym_eig(const RealMatrix& s);

/// Symmetric-definite generalized problem a*v = lambda*b*v.
/// b must be SPD; vectors are normalized so v^T b v = 1, values descending.
/// Solved by whitening b and reducing to sym_eig in whitened coordinates.
EigenPairs generalized_eig(const RealMatrix& a, const RealMatrix& b);

/// Precomputed t x t unitary DFT matrix (forward scale 1/sqrt(t)) for
/// batched row-wise transforms. Bin k corresponds to frequency k*fs/t.
class DftPlan {
  public:
    explicit DftPlan(Index t);
    Index size() const { return t_; }
    /// Row-wise forward transform of an n x t real matrix.
    ComplexMatrix forward(const RealMatrix& epoch) const;

  private:
    Index t_;
    RealMatrix f_re_;  // t x t
    RealMatrix f_im_;
};

/// Row-wise unitary DFT of an n x t epoch. One-shot convenience around
/// DftPlan; for many epochs of the same length build the plan once.
ComplexMatrix unitary_dft(const RealMatrix& epoch);

/// Rank-revealing whitening of a symmetric PSD matrix. Eigenvalues at or
/// below rel_threshold * lambda_max are dropped.
WhiteningProjector whitening_projector(const RealMatrix& sigma_sum,
                                       double rel_threshold = 1e-9);

}  // namespace sacsp
