#include "sacsp/spectral_cov.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sacsp {

const std::vector<ComplexMatrix>& TrainStats::spectra(int class_id) const {
    if (class_id == 1) return spectra1;
    if (class_id == 2) return spectra2;
    throw_invalid("TrainStats: class_id must be 1 or 2");
}

const std::vector<RealMatrix>& TrainStats::bin_cov(int class_id) const {
    if (class_id == 1) return bin_cov1;
    if (class_id == 2) return bin_cov2;
    throw_invalid("TrainStats: class_id must be 1 or 2");
}

const RealMatrix& TrainStats::sigma(int class_id) const {
    if (class_id == 1) return sigma1;
    if (class_id == 2) return sigma2;
    throw_invalid("TrainStats: class_id must be 1 or 2");
}

namespace {

// Segment-averaged E[Re(xhat_k xhat_k^H)] / t for every bin k.
std::vector<RealMatrix> build_bin_cov(const std::vector<ComplexMatrix>& spectra,
                                      Index n, Index t) {
    std::vector<RealMatrix> out(t, RealMatrix::Zero(n, n));
    const double scale = 1.0 / (static_cast<double>(t) * static_cast<double>(spectra.size()));
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < t; ++k) {
        RealMatrix acc = RealMatrix::Zero(n, n);
        for (const ComplexMatrix& s : spectra) {
            const auto col = s.col(k);
            acc.noalias() += (col * col.adjoint()).real();
        }
        out[k] = acc * scale;
    }
    return out;
}

}  // namespace

TrainStats build_train_stats(const EpochSet& set) {
    if (set.epochs.empty()) throw_invalid("build_train_stats: empty epoch set");
    const Index n = set.n_channels;
    const Index t_epoch = set.n_samples();
    if (set.count(1) == 0 || set.count(2) == 0)
        throw_invalid("build_train_stats: both classes must be present");

    // epochs longer than 1 s are split into non-overlapping 1 s segments
    Index t_seg = static_cast<Index>(std::llround(set.fs));
    if (t_epoch <= t_seg) {
        t_seg = t_epoch;
    } else if (t_epoch % t_seg != 0) {
        throw_invalid("build_train_stats: epoch length " + std::to_string(t_epoch) +
                      " is not divisible into 1 s segments of " + std::to_string(t_seg));
    }
    if (t_seg < 2) throw_invalid("build_train_stats: segments too short");
    const Index segs_per_epoch = t_epoch / t_seg;

    const std::size_t n_epochs = set.epochs.size();
    const DftPlan plan(t_seg);

    struct Slot {
        RealMatrix cov;
        std::vector<ComplexMatrix> spectra;
        int label = 0;
    };
    std::vector<Slot> slots(n_epochs);

    for (std::size_t i = 0; i < n_epochs; ++i) {
        if (set.epochs[i].data.rows() != n || set.epochs[i].data.cols() != t_epoch)
            throw_invalid("build_train_stats: epoch " + std::to_string(i) +
                          " shape mismatch");
    }

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n_epochs; ++i) {
        const Epoch& e = set.epochs[i];
        Slot& s = slots[i];
        s.label = e.label;
        s.cov = (e.data * e.data.transpose()) / static_cast<double>(t_epoch);
        s.spectra.reserve(segs_per_epoch);
        for (Index g = 0; g < segs_per_epoch; ++g)
            s.spectra.push_back(plan.forward(e.data.middleCols(g * t_seg, t_seg)));
    }

    TrainStats stats;
    stats.t = t_seg;
    stats.fs = set.fs;
    stats.sigma1 = RealMatrix::Zero(n, n);
    stats.sigma2 = RealMatrix::Zero(n, n);
    Index n1 = 0, n2 = 0;
    for (Slot& s : slots) {  // fixed reduction order keeps runs bit-identical
        if (s.label == 1) {
            stats.sigma1 += s.cov;
            ++n1;
            for (auto& sp : s.spectra) stats.spectra1.push_back(std::move(sp));
        } else {
            stats.sigma2 += s.cov;
            ++n2;
            for (auto& sp : s.spectra) stats.spectra2.push_back(std::move(sp));
        }
    }
    stats.sigma1 /= static_cast<double>(n1);
    stats.sigma2 /= static_cast<double>(n2);
    stats.sigma1 = 0.5 * (stats.sigma1 + stats.sigma1.transpose()).eval();
    stats.sigma2 = 0.5 * (stats.sigma2 + stats.sigma2.transpose()).eval();

    stats.bin_cov1 = build_bin_cov(stats.spectra1, n, t_seg);
    stats.bin_cov2 = build_bin_cov(stats.spectra2, n, t_seg);
    return stats;
}

TrainStats project_stats(const TrainStats& stats, const WhiteningProjector& projector) {
    if (projector.q.cols() != stats.n())
        throw_invalid("project_stats: projector dimension mismatch");

    TrainStats out;
    out.t = stats.t;
    out.fs = stats.fs;
    out.sigma1 = projector.q * stats.sigma1 * projector.q.transpose();
    out.sigma2 = projector.q * stats.sigma2 * projector.q.transpose();
    out.sigma1 = 0.5 * (out.sigma1 + out.sigma1.transpose()).eval();
    out.sigma2 = 0.5 * (out.sigma2 + out.sigma2.transpose()).eval();

    out.spectra1.resize(stats.spectra1.size());
    out.spectra2.resize(stats.spectra2.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < stats.spectra1.size(); ++i)
        out.spectra1[i] = projector.q * stats.spectra1[i];
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < stats.spectra2.size(); ++i)
        out.spectra2[i] = projector.q * stats.spectra2[i];

    out.bin_cov1 = build_bin_cov(out.spectra1, projector.rank, out.t);
    out.bin_cov2 = build_bin_cov(out.spectra2, projector.rank, out.t);
    return out;
}

RealMatrix weighted_cov(const TrainStats& stats, int class_id, const SpectralWeights& w) {
    if (w.size() != stats.t)
        throw_invalid("weighted_cov: weights length " + std::to_string(w.size()) +
                      " != t " + std::to_string(stats.t));
    const auto& stack = stats.bin_cov(class_id);
    RealMatrix acc = RealMatrix::Zero(stats.n(), stats.n());
    for (Index k = 0; k < stats.t; ++k)
        if (w.weights(k) != 0.0) acc.noalias() += w.weights(k) * stack[k];
    return 0.5 * (acc + acc.transpose());
}

BinPowerVector bin_power(const TrainStats& stats, int class_id, const RealVector& w) {
    if (w.size() != stats.n())
        throw_invalid("bin_power: filter length " + std::to_string(w.size()) +
                      " != channel count " + std::to_string(stats.n()));
    const auto& stack = stats.bin_cov(class_id);
    BinPowerVector out;
    out.power.resize(stats.t);
    for (Index k = 0; k < stats.t; ++k)
        out.power(k) = std::max(0.0, w.dot(stack[k] * w));
    return out;
}

SpectralWeights update_weights(const BinPowerVector& power, double fs) {
    const double norm = power.power.norm();
    if (!(norm > 0.0))
        throw_numeric("update_weights: all-zero bin power; the spatial filter is degenerate");
    SpectralWeights out;
    out.weights = power.power / norm;
    out.fs = fs;
    return out;
}

SpectralWeights make_init_weights(InitKind kind, Index t, double fs) {
    if (t < 2) throw_invalid("make_init_weights: need t >= 2");
    RealVector w = RealVector::Zero(t);

    if (kind == InitKind::Uniform) {
        w.setOnes();
    } else {
        const double lo = (kind == InitKind::MuBand) ? 7.0 : 15.0;
        const double hi = (kind == InitKind::MuBand) ? 15.0 : 30.0;
        for (Index k = 0; k <= t / 2; ++k) {
            const double f = static_cast<double>(k) * fs / static_cast<double>(t);
            if (f >= lo && f <= hi) {
                w(k) = 1.0;
                if (k > 0 && k < t - k) w(t - k) = 1.0;  // mirror bin
            }
        }
        if (w.sum() == 0.0)
            throw_config("make_init_weights: band " + std::to_string(lo) + "-" +
                         std::to_string(hi) + " Hz is empty at t=" + std::to_string(t) +
                         ", fs=" + std::to_string(fs));
    }

    SpectralWeights out;
    out.weights = w / w.norm();
    out.fs = fs;
    return out;
}

SpectralWeights cosine_weights(Index t, double fs, bool unit_norm) {
    if (t < 2) throw_invalid("cosine_weights: need t >= 2");
    RealVector w(t);
    for (Index k = 0; k < t; ++k)
        w(k) = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                        static_cast<double>(t));
    SpectralWeights out;
    out.weights = unit_norm ? RealVector(w / w.norm()) : w;
    out.fs = fs;
    return out;
}

const char* to_string(InitKind kind) {
    switch (kind) {
        case InitKind::Uniform: return "uniform";
        case InitKind::MuBand: return "mu_band";
        case InitKind::BetaBand: return "beta_band";
    }
    return "uniform";
}

InitKind init_kind_from_string(const std::string& name) {
    if (name == "uniform") return InitKind::Uniform;
    if (name == "mu_band") return InitKind::MuBand;
    if (name == "beta_band") return InitKind::BetaBand;
    throw_config("unknown init kind '" + name + "' (expected uniform|mu_band|beta_band)");
}

}  // namespace sacsp
