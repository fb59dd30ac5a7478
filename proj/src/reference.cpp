#include "sacsp/reference.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace sacsp::reference {

namespace {

void check_class(int class_id) {
    if (class_id != 1 && class_id != 2)
        throw_invalid("reference: class_id must be 1 or 2");
}

}  // namespace

ComplexMatrix naive_dft(const RealMatrix& epoch) {
    const Index n = epoch.rows();
    const Index t = epoch.cols();
    if (t < 2) throw_invalid("naive_dft: need at least 2 samples");
    const double scale = 1.0 / std::sqrt(static_cast<double>(t));
    ComplexMatrix out(n, t);
    for (Index c = 0; c < n; ++c) {
        for (Index k = 0; k < t; ++k) {
            std::complex<double> sum(0.0, 0.0);
            for (Index j = 0; j < t; ++j) {
                const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) *
                                   static_cast<double>(k) / static_cast<double>(t);
                sum += epoch(c, j) * std::polar(1.0, ang);
            }
            out(c, k) = sum * scale;
        }
    }
    return out;
}

RealMatrix class_covariance_direct(const EpochSet& set, int class_id) {
    check_class(class_id);
    const Index n = set.n_channels;
    RealMatrix acc = RealMatrix::Zero(n, n);
    Index count = 0;
    for (const Epoch& e : set.epochs) {
        if (e.label != class_id) continue;
        acc += e.data * e.data.transpose() / static_cast<double>(e.data.cols());
        ++count;
    }
    if (count == 0) throw_invalid("reference: class " + std::to_string(class_id) + " empty");
    return acc / static_cast<double>(count);
}

RealMatrix weighted_cov_direct(const EpochSet& set, int class_id, const RealVector& h) {
    check_class(class_id);
    const Index n = set.n_channels;
    RealMatrix acc = RealMatrix::Zero(n, n);
    Index count = 0;
    for (const Epoch& e : set.epochs) {
        if (e.label != class_id) continue;
        const Index t = e.data.cols();
        if (h.size() != t) throw_invalid("weighted_cov_direct: weight length mismatch");
        const ComplexMatrix xhat = naive_dft(e.data);
        const ComplexMatrix g = xhat * h.cast<std::complex<double>>().asDiagonal() * xhat.adjoint();
        acc += g.real() / static_cast<double>(t);
        ++count;
    }
    if (count == 0) throw_invalid("reference: class " + std::to_string(class_id) + " empty");
    acc /= static_cast<double>(count);
    return 0.5 * (acc + acc.transpose());
}

RealVector bin_power_direct(const EpochSet& set, int class_id, const RealVector& w) {
    check_class(class_id);
    const Index t = set.n_samples();
    RealVector acc = RealVector::Zero(t);
    Index count = 0;
    for (const Epoch& e : set.epochs) {
        if (e.label != class_id) continue;
        const ComplexMatrix xhat = naive_dft(e.data);
        for (Index k = 0; k < t; ++k)
            acc(k) += std::norm(w.cast<std::complex<double>>().dot(xhat.col(k))) /
                      static_cast<double>(t);
        ++count;
    }
    if (count == 0) throw_invalid("reference: class " + std::to_string(class_id) + " empty");
    return acc / static_cast<double>(count);
}

RealMatrix cyclic_shift_cov_direct(const EpochSet& set, int class_id) {
    check_class(class_id);
    const Index n = set.n_channels;
    const Index t = set.n_samples();

    RealMatrix shift = RealMatrix::Zero(t, t);  // (S x)_j = x_{j-1 mod t}
    for (Index j = 0; j < t; ++j) shift(j, (j + t - 1) % t) = 1.0;
    const RealMatrix sym = 0.5 * (shift + shift.transpose());

    RealMatrix acc = RealMatrix::Zero(n, n);
    Index count = 0;
    for (const Epoch& e : set.epochs) {
        if (e.label != class_id) continue;
        acc += e.data * sym * e.data.transpose() / static_cast<double>(t);
        ++count;
    }
    if (count == 0) throw_invalid("reference: class " + std::to_string(class_id) + " empty");
    acc /= static_cast<double>(count);
    return 0.5 * (acc + acc.transpose());
}

TrainStats build_train_stats_serial(const EpochSet& set) {
    if (set.epochs.empty()) throw_invalid("build_train_stats_serial: empty epoch set");
    const Index n = set.n_channels;
    const Index t_epoch = set.n_samples();
    Index t_seg = static_cast<Index>(std::llround(set.fs));
    if (t_epoch <= t_seg) t_seg = t_epoch;
    else if (t_epoch % t_seg != 0)
        throw_invalid("build_train_stats_serial: epoch not divisible into 1 s segments");

    TrainStats stats;
    stats.t = t_seg;
    stats.fs = set.fs;
    stats.sigma1 = RealMatrix::Zero(n, n);
    stats.sigma2 = RealMatrix::Zero(n, n);
    Index n1 = 0, n2 = 0;
    for (const Epoch& e : set.epochs) {
        RealMatrix cov = e.data * e.data.transpose() / static_cast<double>(t_epoch);
        auto& spectra = (e.label == 1) ? stats.spectra1 : stats.spectra2;
        for (Index g = 0; g * t_seg < t_epoch; ++g)
            spectra.push_back(naive_dft(e.data.middleCols(g * t_seg, t_seg)));
        if (e.label == 1) {
            stats.sigma1 += cov;
            ++n1;
        } else {
            stats.sigma2 += cov;
            ++n2;
        }
    }
    if (n1 == 0 || n2 == 0)
        throw_invalid("build_train_stats_serial: both classes must be present");
    stats.sigma1 /= static_cast<double>(n1);
    stats.sigma2 /= static_cast<double>(n2);
    stats.sigma1 = 0.5 * (stats.sigma1 + stats.sigma1.transpose()).eval();
    stats.sigma2 = 0.5 * (stats.sigma2 + stats.sigma2.transpose()).eval();

    for (int cls = 1; cls <= 2; ++cls) {
        auto& spectra = (cls == 1) ? stats.spectra1 : stats.spectra2;
        auto& stack = (cls == 1) ? stats.bin_cov1 : stats.bin_cov2;
        stack.assign(static_cast<std::size_t>(t_seg), RealMatrix::Zero(n, n));
        for (const ComplexMatrix& s : spectra)
            for (Index k = 0; k < t_seg; ++k)
                stack[static_cast<std::size_t>(k)] += (s.col(k) * s.col(k).adjoint()).real();
        const double scale =
            1.0 / (static_cast<double>(t_seg) * static_cast<double>(spectra.size()));
        for (RealMatrix& m : stack) m *= scale;
    }
    return stats;
}

}  // namespace sacsp::reference
