#include "sacsp/linalg.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sacsp {

namespace {

void require_square(const RealMatrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw_invalid(std::string(who) + ": matrix must be square, got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void require_symmetric(const RealMatrix& m, const char* who) {
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > 1e-10 * scale)
        throw_invalid(std::string(who) + ": matrix not symmetric (relative asymmetry " +
                      std::to_string(asym / scale) + ")");
}

// Flip each column so its largest-magnitude entry is positive. Eigenvector
// signs are otherwise arbitrary; pinning them keeps results deterministic.
void fix_column_signs(RealMatrix& v) {
    for (Index j = 0; j < v.cols(); ++j) {
        Index imax = 0;
        v.col(j).cwiseAbs().maxCoeff(&imax);
        if (v(imax, j) < 0.0) v.col(j) = -v.col(j);
    }
}

}  // namespace

EigenPairs sym_eig(const RealMatrix& s) {
    require_square(s, "sym_eig");
    require_symmetric(s, "sym_eig");

    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(s);
    if (solver.info() != Eigen::Success)
        throw_numeric("sym_eig: eigensolver failed to converge on " +
                      std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                      " matrix");

    EigenPairs out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    fix_column_signs(out.vectors);
    return out;
}

EigenPairs generalized_eig(const RealMatrix& a, const RealMatrix& b) {
    require_square(a, "generalized_eig");
    require_square(b, "generalized_eig");
    if (a.rows() != b.rows())
        throw_invalid("generalized_eig: a and b sizes differ");
    require_symmetric(a, "generalized_eig");
    require_symmetric(b, "generalized_eig");

    EigenPairs eb = sym_eig(b);
    const double bmax = eb.values(0);
    const double bmin = eb.values(eb.values.size() - 1);
    if (bmax <= 0.0 || bmin <= 1e-12 * bmax)
        throw_numeric(
            "generalized_eig: b is not positive definite; reduce to a full-rank "
            "subspace with a WhiteningProjector first");

    // T = Lambda^{-1/2} U^T whitens b; solve the plain symmetric problem in
    // whitened coordinates and map vectors back with T^T.
    RealMatrix t = eb.values.cwiseSqrt().cwiseInverse().asDiagonal() * eb.vectors.transpose();
    RealMatrix m = t * a * t.transpose();
    m = 0.5 * (m + m.transpose());

    EigenPairs em = sym_eig(m);
    EigenPairs out;
    out.values = em.values;
    out.vectors = t.transpose() * em.vectors;  // v^T b v = 1 by construction
    fix_column_signs(out.vectors);
    return out;
}

DftPlan::DftPlan(Index t) : t_(t), f_re_(t, t), f_im_(t, t) {
    if (t < 2) throw_invalid("DftPlan: need at least 2 samples, got " + std::to_string(t));
    const double scale = 1.0 / std::sqrt(static_cast<double>(t));
    const double step = 2.0 * std::numbers::pi / static_cast<double>(t);
    for (Index j = 0; j < t; ++j) {
        for (Index k = 0; k < t; ++k) {
            // reduce j*k mod t before the trig call; keeps the matrix
            // conjugate-symmetric to near machine precision
            const Index m = (j * k) % t;
            const double ang = step * static_cast<double>(m);
            f_re_(j, k) = std::cos(ang) * scale;
            f_im_(j, k) = -std::sin(ang) * scale;
        }
    }
}

ComplexMatrix DftPlan::forward(const RealMatrix& epoch) const {
    if (epoch.cols() != t_)
        throw_invalid("DftPlan::forward: epoch has " + std::to_string(epoch.cols()) +
                      " samples, plan built for " + std::to_string(t_));
    ComplexMatrix out(epoch.rows(), t_);
    out.real() = epoch * f_re_;
    out.imag() = epoch * f_im_;
    return out;
}

ComplexMatrix unitary_dft(const RealMatrix& epoch) {
    return DftPlan(epoch.cols()).forward(epoch);
}

WhiteningProjector whitening_projector(const RealMatrix& sigma_sum, double rel_threshold) {
    require_square(sigma_sum, "whitening_projector");
    require_symmetric(sigma_sum, "whitening_projector");
    if (rel_threshold <= 0.0 || rel_threshold >= 1.0)
        throw_config("whitening_projector: rel_threshold must be in (0,1), got " +
                     std::to_string(rel_threshold));

    EigenPairs e = sym_eig(sigma_sum);
    const double lmax = e.values(0);
    if (!(lmax > 0.0))
        throw_numeric("whitening_projector: covariance is degenerate (no positive eigenvalue)");

    Index rank = 0;
    while (rank < e.values.size() && e.values(rank) > rel_threshold * lmax) ++rank;

    WhiteningProjector out;
    out.rank = rank;
    out.retained_eigenvalues = e.values.head(rank);
    out.q = out.retained_eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
            e.vectors.leftCols(rank).transpose();
    return out;
}

}  // namespace sacsp
