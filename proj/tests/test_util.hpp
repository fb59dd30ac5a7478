#pragma once

#include <random>

#include "sacsp/types.hpp"

namespace sacsp::testutil {

inline RealMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    RealMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
    return m;
}

inline RealMatrix random_symmetric(Index n, std::uint64_t seed) {
    RealMatrix m = random_matrix(n, n, seed);
    return 0.5 * (m + m.transpose()).eval();
}

inline RealMatrix random_spd(Index n, std::uint64_t seed, double ridge = 0.1) {
    RealMatrix m = random_matrix(n, n, seed);
    return (m * m.transpose() + ridge * static_cast<double>(n) *
                                    RealMatrix::Identity(n, n))
        .eval();
}

inline RealVector random_unit(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RealVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
    return v.normalized();
}

/// Random epoch set with gaussian data (both classes present).
inline EpochSet random_epoch_set(Index n_channels, Index t, Index per_class,
                                 std::uint64_t seed, double fs = 100.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    EpochSet set;
    set.fs = fs;
    set.n_channels = n_channels;
    for (Index i = 0; i < 2 * per_class; ++i) {
        Epoch e;
        e.label = (i % 2 == 0) ? 1 : 2;
        e.fs = fs;
        e.data.resize(n_channels, t);
        for (Index r = 0; r < n_channels; ++r)
            for (Index c = 0; c < t; ++c) e.data(r, c) = gauss(rng);
        set.epochs.push_back(std::move(e));
    }
    return set;
}

}  // namespace sacsp::testutil
