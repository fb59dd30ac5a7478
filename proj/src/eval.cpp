#include "sacsp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "sacsp/preprocess.hpp"

namespace sacsp {

namespace {

double accuracy_on(const SacspModel& model, const EpochSet& test) {
    Index correct = 0;
    for (const Epoch& e : test.epochs)
        if (predict(model, e).label == e.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.epochs.size());
}

void finalize(EvalReport& report) {
    const auto& acc = report.per_repeat_accuracy;
    report.mean = std::accumulate(acc.begin(), acc.end(), 0.0) /
                  static_cast<double>(acc.size());
    double sq = 0.0;
    for (double a : acc) sq += (a - report.mean) * (a - report.mean);
    report.dispersion =
        acc.size() > 1 ? std::sqrt(sq / static_cast<double>(acc.size() - 1)) : 0.0;
}

template <typename Fn>
std::vector<double> run_repeats(int n_repeats, Fn&& repeat_body) {
    if (n_repeats < 1) throw_config("eval: n_repeats must be >= 1");
    std::vector<double> acc(static_cast<std::size_t>(n_repeats), 0.0);
    std::optional<Error> failure;
#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < n_repeats; ++rep) {
        try {
            acc[static_cast<std::size_t>(rep)] = repeat_body(rep);
        } catch (const Error& e) {
#pragma omp critical
            if (!failure) failure = e;
        } catch (const std::exception& e) {
#pragma omp critical
            if (!failure) failure = Error(ErrorKind::Numeric, e.what());
        }
    }
    if (failure) throw *failure;
    return acc;
}

void check_compatible(const EpochSet& calib, const EpochSet& online) {
    if (calib.n_channels != online.n_channels || calib.fs != online.fs ||
        calib.n_samples() != online.n_samples())
        throw_invalid("run_transfer: calibration and online sets are incompatible");
}

}  // namespace

EvalReport run_transfer(const EpochSet& calib, const EpochSet& online, Algo algo,
                        const SacspConfig& config, const SplitPlan& plan) {
    if (plan.protocol != Protocol::Transfer)
        throw_config("run_transfer: plan protocol must be transfer");
    check_compatible(calib, online);

    EvalReport report;
    report.algo_tag = to_string(algo);
    report.protocol_tag = "transfer";
    report.per_repeat_accuracy = run_repeats(plan.n_repeats, [&](int rep) {
        const EpochSet c = balance_classes(calib, derive_seed(plan.seed, 2ull * rep));
        const EpochSet o = balance_classes(online, derive_seed(plan.seed, 2ull * rep + 1));
        const SacspModel model = train_model(c, algo, config);
        return accuracy_on(model, o);
    });
    finalize(report);
    return report;
}

EvalReport run_transfer_fixed(const SacspModel& model, const EpochSet& online,
                              const SplitPlan& plan) {
    EvalReport report;
    report.algo_tag = model.bank.algo_tag;
    report.protocol_tag = "transfer";
    report.per_repeat_accuracy = run_repeats(plan.n_repeats, [&](int rep) {
        const EpochSet o = balance_classes(online, derive_seed(plan.seed, 2ull * rep + 1));
        return accuracy_on(model, o);
    });
    finalize(report);
    return report;
}

EvalReport run_kfold(const EpochSet& set, Algo algo, const SacspConfig& config,
                     const SplitPlan& plan) {
    if (plan.protocol != Protocol::Kfold)
        throw_config("run_kfold: plan protocol must be kfold");
    const int k = plan.k;
    if (k < 2) throw_config("run_kfold: k must be >= 2");
    const Index min_count = std::min(set.count(1), set.count(2));
    if (static_cast<Index>(k) > min_count)
        throw_invalid("run_kfold: k=" + std::to_string(k) +
                      " exceeds the smaller class count " + std::to_string(min_count));

    EvalReport report;
    report.algo_tag = to_string(algo);
    report.protocol_tag = "kfold";
    report.per_repeat_accuracy = run_repeats(plan.n_repeats, [&](int rep) {
        std::mt19937_64 rng(derive_seed(plan.seed, static_cast<std::uint64_t>(rep)));

        // stratified fold assignment: shuffle within class, deal round-robin
        std::vector<int> fold_of(set.epochs.size(), 0);
        for (int cls = 1; cls <= 2; ++cls) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < set.epochs.size(); ++i)
                if (set.epochs[i].label == cls) idx.push_back(i);
            std::shuffle(idx.begin(), idx.end(), rng);
            for (std::size_t j = 0; j < idx.size(); ++j)
                fold_of[idx[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
        }

        double fold_acc_sum = 0.0;
        for (int f = 0; f < k; ++f) {
            EpochSet train, test;
            train.fs = test.fs = set.fs;
            train.n_channels = test.n_channels = set.n_channels;
            for (std::size_t i = 0; i < set.epochs.size(); ++i)
                (fold_of[i] == f ? test : train).epochs.push_back(set.epochs[i]);
            const SacspModel model = train_model(train, algo, config);
            fold_acc_sum += accuracy_on(model, test);
        }
        return fold_acc_sum / static_cast<double>(k);
    });
    finalize(report);
    return report;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw_invalid("wilcoxon_signed_rank: sequences must have equal length");

    std::vector<double> diff;
    diff.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diff.push_back(d);
    }
    const int n = static_cast<int>(diff.size());
    if (n < 5)
        throw_invalid("wilcoxon_signed_rank: fewer than 5 nonzero differences (" +
                      std::to_string(n) + ")");

    // average ranks of |d|, ties averaged
    std::vector<int> order(diff.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return std::abs(diff[i]) < std::abs(diff[j]);
    });
    std::vector<double> rank(diff.size(), 0.0);
    std::vector<double> tie_sizes;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() &&
               std::abs(diff[order[j]]) == std::abs(diff[order[i]]))
            ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t m = i; m < j; ++m) rank[order[m]] = avg;
        if (j - i > 1) tie_sizes.push_back(static_cast<double>(j - i));
        i = j;
    }

    double w_plus = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i)
        if (diff[i] > 0.0) w_plus += rank[i];
    const double total = static_cast<double>(n) * (n + 1) / 2.0;
    const double w_minus = total - w_plus;

    WilcoxonResult out;
    out.n_used = n;
    out.statistic = std::min(w_plus, w_minus);

    if (n <= 25) {
        // exact null distribution of W+ over all 2^n sign assignments.
        // Doubling the (possibly half-integer) ranks makes the sums integral
        // so a subset-sum count gives the distribution exactly, ties included.
        std::vector<long long> r2(diff.size());
        long long max_sum = 0;
        for (std::size_t i = 0; i < diff.size(); ++i) {
            r2[i] = std::llround(2.0 * rank[i]);
            max_sum += r2[i];
        }
        std::vector<double> count(static_cast<std::size_t>(max_sum + 1), 0.0);
        count[0] = 1.0;
        for (long long r : r2)
            for (long long s = max_sum; s >= r; --s)
                count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r)];

        const double denom = std::pow(2.0, n);
        const long long w2 = std::llround(2.0 * w_plus);
        double p_le = 0.0, p_ge = 0.0;
        for (long long s = 0; s <= max_sum; ++s) {
            if (s <= w2) p_le += count[static_cast<std::size_t>(s)];
            if (s >= w2) p_ge += count[static_cast<std::size_t>(s)];
        }
        out.p_two_sided = std::min(1.0, 2.0 * std::min(p_le, p_ge) / denom);
    } else {
        const double mu = total / 2.0;
        double var = static_cast<double>(n) * (n + 1) * (2 * n + 1) / 24.0;
        for (double t : tie_sizes) var -= (t * t * t - t) / 48.0;
        if (!(var > 0.0))
            throw_invalid("wilcoxon_signed_rank: zero variance (all differences tied)");
        const double z = (w_plus - mu) / std::sqrt(var);
        out.p_two_sided = std::erfc(std::abs(z) / std::sqrt(2.0));
    }
    return out;
}

}  // namespace sacsp
