#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sacsp/classify.hpp"
#include "sacsp/types.hpp"

namespace sacsp {

enum class Protocol { Transfer, Kfold };

struct SplitPlan {
    Protocol protocol = Protocol::Transfer;
    int k = 5;           // kfold only
    int n_repeats = 10;
    std::uint64_t seed = 0;
};

struct EvalReport {
    std::vector<double> per_repeat_accuracy;
    double mean = 0.0;
    double dispersion = 0.0;  // sample std over repeats
    std::string algo_tag;
    std::string protocol_tag;
};

/// Calibration -> online transfer. Each repeat rebalances both sets with a
/// repeat-derived seed, trains on the balanced calibration set and tests on
/// the balanced online set. The same plan seed yields identical balanced
/// subsets for every algorithm, so reports are paired-comparable.
EvalReport run_transfer(const EpochSet& calib, const EpochSet& online, Algo algo,
                        const SacspConfig& config, const SplitPlan& plan);

/// Evaluate one fixed model: repeats only rebalance the online set.
EvalReport run_transfer_fixed(const SacspModel& model, const EpochSet& online,
                              const SplitPlan& plan);

/// Stratified k-fold cross-validation; each repeat redraws fold assignments.
EvalReport run_kfold(const EpochSet& set, Algo algo, const SacspConfig& config,
                     const SplitPlan& plan);

struct WilcoxonResult {
    double statistic = 0.0;   // min(W+, W-)
    double p_two_sided = 1.0;
    int n_used = 0;           // pairs left after dropping zero differences
};

/// Paired two-sided Wilcoxon signed-rank test with average ranks for ties;
/// exact distribution for n <= 25, normal approximation with tie correction
/// above.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

}  // namespace sacsp
