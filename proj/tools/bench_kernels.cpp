// Timing comparison of the OpenMP kernels against their serial reference
// implementations, plus end-to-end training at 1 vs N threads.

#include <chrono>
#include <cstdio>

#include "sacsp/algorithms.hpp"
#include "sacsp/parallel.hpp"
#include "sacsp/reference.hpp"
#include "sacsp/spectral_cov.hpp"
#include "sacsp/synth.hpp"

using namespace sacsp;

namespace {

template <typename Fn>
double time_ms(Fn&& fn, int iters = 3) {
    using clock = std::chrono::steady_clock;
    double best = 1e300;
    for (int i = 0; i < iters; ++i) {
        const auto t0 = clock::now();
        fn();
        const auto t1 = clock::now();
        best = std::min(best,
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main() {
    parallel::configure_from_env();
    const int threads = parallel::worker_count();

    SynthSpec spec = default_synth_spec(42);
    spec.n_channels = 32;
    spec.n_epochs_per_class = 128;
    SynthSource& d = spec.sources[0];
    d.mixing = RealVector::Zero(32);
    d.mixing(4) = 1.0;
    SynthSource& x = spec.sources[1];
    x.mixing = RealVector::Zero(32);
    x.mixing(20) = 1.0;

    std::printf("sacsp kernel benchmark (%d worker threads)\n", threads);
    std::printf("%-34s %12s %12s %8s\n", "kernel", "reference ms", "kernel ms", "speedup");

    EpochSet set;
    const double gen_par = time_ms([&] { set = generate(spec); });
    EpochSet set_ref;
    const double gen_ser = time_ms([&] { set_ref = reference::generate_serial(spec); });
    std::printf("%-34s %12.2f %12.2f %7.2fx\n", "synth generate (256 epochs)", gen_ser,
                gen_par, gen_ser / gen_par);

    TrainStats stats;
    const double stats_par = time_ms([&] { stats = build_train_stats(set); });
    TrainStats stats_ref;
    const double stats_ser =
        time_ms([&] { stats_ref = reference::build_train_stats_serial(set); });
    std::printf("%-34s %12.2f %12.2f %7.2fx\n", "train stats (DFT + bin stack)",
                stats_ser, stats_par, stats_ser / stats_par);

    const SpectralWeights h = make_init_weights(InitKind::MuBand, stats.t, stats.fs);
    RealMatrix g;
    const double cov_fast = time_ms([&] {
        for (int i = 0; i < 100; ++i) g = weighted_cov(stats, 1, h);
    });
    RealMatrix g_ref;
    const double cov_direct = time_ms([&] { g_ref = reference::weighted_cov_direct(set, 1, h.weights); });
    std::printf("%-34s %12.2f %12.2f %7.2fx\n",
                "weighted cov (direct vs 100x stack)", cov_direct, cov_fast,
                cov_direct / cov_fast);
    std::printf("    stack vs direct max abs diff: %.3e\n",
                (g - g_ref).cwiseAbs().maxCoeff());

    SacspConfig config;
    parallel::set_worker_count(1);
    const double train_1 = time_ms([&] { (void)train_sacsp(set, config); }, 2);
    parallel::set_worker_count(threads);
    const double train_n = time_ms([&] { (void)train_sacsp(set, config); }, 2);
    std::printf("%-34s %12.2f %12.2f %7.2fx\n", "train_sacsp (1 vs N threads)", train_1,
                train_n, train_1 / train_n);

    return 0;
}
