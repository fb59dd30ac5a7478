#include "sacsp/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace sacsp {

void SacspConfig::validate() const {
    if (r_filters < 1) throw_config("sacsp config: r_filters must be >= 1");
    if (!(epsilon > 0.0)) throw_config("sacsp config: epsilon must be > 0");
    if (max_iters < 1) throw_config("sacsp config: max_iters must be >= 1");
    if (m_inits < 1) throw_config("sacsp config: m_inits must be >= 1");
    if (static_cast<int>(init_kinds.size()) != m_inits)
        throw_config("sacsp config: init_kinds length must equal m_inits");
    if (!(whiten_threshold > 0.0 && whiten_threshold < 1.0))
        throw_config("sacsp config: whiten_threshold must be in (0,1)");
}

double objective(const TrainStats& stats, int class_id, const RealVector& w,
                 const SpectralWeights& h) {
    const RealMatrix gamma = weighted_cov(stats, class_id, h);
    const double num = w.dot(gamma * w);
    const double den = w.dot((stats.sigma1 + stats.sigma2) * w);
    if (!(den > 0.0))
        throw_numeric("objective: denominator w^T (Sigma1+Sigma2) w is not positive");
    return num / den;
}

namespace {

struct WhitenedProblem {
    TrainStats white;  // statistics in whitened coordinates
    WhiteningProjector projector;
};

WhitenedProblem prepare(const EpochSet& set, double whiten_threshold, int r_filters) {
    TrainStats raw = build_train_stats(set);
    RealMatrix sum = raw.sigma1 + raw.sigma2;
    sum = 0.5 * (sum + sum.transpose()).eval();
    WhiteningProjector proj = whitening_projector(sum, whiten_threshold);
    if (proj.rank < 2 * r_filters)
        throw_numeric("training: whitened rank " + std::to_string(proj.rank) +
                      " is too small for r_filters=" + std::to_string(r_filters));
    return {project_stats(raw, proj), std::move(proj)};
}

// Sign convention: flip so the back-projected filter's largest-magnitude
// entry is positive. Returns +1/-1.
double filter_sign(const WhiteningProjector& proj, const RealVector& w_white) {
    RealVector w = proj.q.transpose() * w_white;
    Index imax = 0;
    w.cwiseAbs().maxCoeff(&imax);
    return w(imax) < 0.0 ? -1.0 : 1.0;
}

// Patterns for selected columns of a whitened eigenvector matrix, with the
// requested sign flips applied to those columns first.
RealMatrix patterns_for(const EigenPairs& eig, const WhiteningProjector& proj,
                        const std::vector<std::pair<Index, double>>& cols) {
    EigenPairs flipped = eig;
    for (const auto& [j, sign] : cols)
        if (sign < 0.0) flipped.vectors.col(j) = -flipped.vectors.col(j);
    RealMatrix full = compute_patterns(flipped, proj);
    RealMatrix out(full.rows(), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = full.col(cols[i].first);
    return out;
}

TrainedFilterBank train_fixed_weights(const EpochSet& set, int r_filters,
                                      double whiten_threshold,
                                      const std::string& algo_tag) {
    if (r_filters < 1) throw_config("train_" + algo_tag + ": r_filters must be >= 1");
    auto [white, proj] = prepare(set, whiten_threshold, r_filters);
    const Index rank = proj.rank;
    const bool csp = algo_tag == "csp";

    const SpectralWeights h_csp = make_init_weights(InitKind::Uniform, white.t, white.fs);
    const SpectralWeights h_cca = csp ? h_csp : cosine_weights(white.t, white.fs, true);

    TrainedFilterBank bank;
    bank.algo_tag = algo_tag;
    bank.t = white.t;
    bank.fs = white.fs;
    bank.patterns.resize(proj.q.cols(), 2 * r_filters);

    // CSP solves one problem and reads class 2 off the bottom eigenvectors;
    // the cosine-weighted variant solves one problem per class.
    std::vector<std::pair<EigenPairs, std::vector<std::pair<Index, double>>>> problems;
    if (csp) {
        EigenPairs eig = sym_eig(white.sigma1);
        problems.push_back({std::move(eig), {}});
    } else {
        problems.push_back({sym_eig(weighted_cov(white, 1, h_cca)), {}});
        problems.push_back({sym_eig(weighted_cov(white, 2, h_cca)), {}});
    }

    auto add_pair = [&](int class_id, EigenPairs& eig,
                        std::vector<std::pair<Index, double>>& cols, Index col) {
        const double sign = filter_sign(proj, eig.vectors.col(col));
        cols.push_back({col, sign});
        FilterPair p;
        p.spatial = sign * (proj.q.transpose() * eig.vectors.col(col));
        p.spectral = h_cca;
        p.class_id = class_id;
        p.objective = objective(white, class_id, eig.vectors.col(col), h_cca);
        bank.pairs.push_back(std::move(p));

        OptTrace tr;
        tr.class_id = class_id;
        tr.eigvec_index = static_cast<int>(col);
        tr.objectives = {bank.pairs.back().objective};
        tr.selected = true;
        bank.trace.push_back(std::move(tr));
    };

    if (csp) {
        auto& [eig, cols] = problems[0];
        for (Index r = 0; r < r_filters; ++r) add_pair(1, eig, cols, r);
        for (Index r = 0; r < r_filters; ++r) add_pair(2, eig, cols, rank - 1 - r);
        RealMatrix pat = patterns_for(eig, proj, cols);
        bank.patterns = pat;
    } else {
        for (Index r = 0; r < r_filters; ++r) add_pair(1, problems[0].first, problems[0].second, r);
        for (Index r = 0; r < r_filters; ++r) add_pair(2, problems[1].first, problems[1].second, r);
        bank.patterns.leftCols(r_filters) =
            patterns_for(problems[0].first, proj, problems[0].second);
        bank.patterns.rightCols(r_filters) =
            patterns_for(problems[1].first, proj, problems[1].second);
    }

    bank.projector = std::move(proj);
    return bank;
}

struct Candidate {
    RealVector w_white;
    SpectralWeights h;
    double objective = 0.0;
    int m = 0;
    int r = 0;
    Index col_in_final = 0;  // column of w in the final eigenvector matrix
    EigenPairs final_eig;    // eigenpairs of the final weighted covariance
    OptTrace trace;
};

}  // namespace

TrainedFilterBank train_sacsp(const EpochSet& set, const SacspConfig& config) {
    config.validate();
    auto [white, proj] = prepare(set, config.whiten_threshold, config.r_filters);
    const int r_filters = config.r_filters;
    const int m_inits = config.m_inits;

    std::vector<SpectralWeights> inits;
    inits.reserve(config.init_kinds.size());
    for (InitKind kind : config.init_kinds)
        inits.push_back(make_init_weights(kind, white.t, white.fs));

    // denominator is the identity in whitened coordinates up to rounding, so
    // the recorded objective uses the true quotient while the updates use
    // plain symmetric eigendecompositions
    const int n_candidates = 2 * m_inits * r_filters;
    std::vector<Candidate> cands(n_candidates);
    std::optional<Error> failure;

#pragma omp parallel for collapse(2) schedule(dynamic)
    for (int class_id = 1; class_id <= 2; ++class_id) {
        for (int m = 0; m < m_inits; ++m) {
            try {
                const SpectralWeights& h0 = inits[m];
                EigenPairs eig0 = sym_eig(weighted_cov(white, class_id, h0));
                if (!(eig0.values(0) > 0.0) || !std::isfinite(eig0.values(0)))
                    throw_numeric("train_sacsp: degenerate class-" +
                                  std::to_string(class_id) +
                                  " statistics (non-positive leading eigenvalue)");

                for (int r = 0; r < r_filters; ++r) {
                    Candidate cand;
                    cand.m = m;
                    cand.r = r;
                    cand.trace.class_id = class_id;
                    cand.trace.init_index = m;
                    cand.trace.eigvec_index = r;
                    cand.w_white = eig0.vectors.col(r);
                    cand.h = h0;

                    double obj = objective(white, class_id, cand.w_white, cand.h);
                    cand.trace.objectives.push_back(obj);
                    cand.col_in_final = r;
                    cand.final_eig = eig0;

                    if (!config.disable_spectral_updates) {
                        for (int it = 0; it < config.max_iters; ++it) {
                            const BinPowerVector p = bin_power(white, class_id, cand.w_white);
                            cand.h = update_weights(p, white.fs);
                            EigenPairs eig = sym_eig(weighted_cov(white, class_id, cand.h));
                            cand.w_white = eig.vectors.col(0);
                            cand.final_eig = std::move(eig);
                            cand.col_in_final = 0;

                            const double next = objective(white, class_id, cand.w_white, cand.h);
                            cand.trace.objectives.push_back(next);
                            const double gain = next - obj;
                            obj = next;
                            if (gain <= config.epsilon) break;
                            if (it == config.max_iters - 1) cand.trace.hit_max_iters = true;
                        }
                    }
                    cand.objective = obj;
                    cands[((class_id - 1) * m_inits + m) * r_filters + r] = std::move(cand);
                }
            } catch (const Error& e) {
#pragma omp critical
                if (!failure) failure = e;
            } catch (const std::exception& e) {
#pragma omp critical
                if (!failure) failure = Error(ErrorKind::Numeric, e.what());
            }
        }
    }
    if (failure) throw *failure;

    TrainedFilterBank bank;
    bank.algo_tag = "sacsp";
    bank.t = white.t;
    bank.fs = white.fs;
    bank.patterns.resize(proj.q.cols(), 2 * r_filters);

    // Final selection: per class, the R candidates with the highest training
    // objective; ties broken by (m asc, r asc). Duplicates are legal.
    for (int class_id = 1; class_id <= 2; ++class_id) {
        std::vector<int> order(m_inits * r_filters);
        const int base = (class_id - 1) * m_inits * r_filters;
        std::iota(order.begin(), order.end(), base);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return cands[a].objective > cands[b].objective;
        });

        for (int i = 0; i < r_filters; ++i) {
            Candidate& c = cands[order[i]];
            c.trace.selected = true;
            const double sign = filter_sign(proj, c.w_white);

            FilterPair p;
            p.spatial = sign * (proj.q.transpose() * c.w_white);
            p.spectral = c.h;
            p.class_id = class_id;
            p.objective = c.objective;

            const Index col = (class_id - 1) * r_filters + i;
            bank.patterns.col(col) =
                patterns_for(c.final_eig, proj, {{c.col_in_final, sign}}).col(0);
            bank.pairs.push_back(std::move(p));
        }
    }
    for (Candidate& c : cands) bank.trace.push_back(std::move(c.trace));

    bank.projector = std::move(proj);
    return bank;
}

TrainedFilterBank train_csp(const EpochSet& set, int r_filters, double whiten_threshold) {
    return train_fixed_weights(set, r_filters, whiten_threshold, "csp");
}

TrainedFilterBank train_ccacsp(const EpochSet& set, int r_filters, double whiten_threshold) {
    return train_fixed_weights(set, r_filters, whiten_threshold, "ccacsp");
}

RealMatrix compute_patterns(const EigenPairs& eigvecs_full,
                            const WhiteningProjector& projector) {
    const RealMatrix& a = eigvecs_full.vectors;
    if (a.rows() != a.cols())
        throw_invalid("compute_patterns: eigenvector matrix must be square (whitened space)");
    if (a.rows() != projector.rank)
        throw_invalid("compute_patterns: eigenvector matrix size does not match projector rank");

    Eigen::FullPivLU<RealMatrix> lu(a);
    if (!lu.isInvertible())
        throw_numeric("compute_patterns: eigenvector matrix is singular");
    RealMatrix a_inv_t = lu.inverse().transpose();
    return projector.q.transpose() * a_inv_t;
}

}  // namespace sacsp
