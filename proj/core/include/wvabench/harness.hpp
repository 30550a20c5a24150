#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wvabench/config.hpp"
#include "wvabench/estimators.hpp"
#include "wvabench/fisher.hpp"

namespace wvabench {

/// Everything computed for one Monte Carlo trial. The aggregate statistics
/// are a pure function of these records, reduced in trial order.
struct TrialRecord {
    std::size_t n_check = 0;
    double mle = 0.0;
    double mle_variance = 0.0;
    double smle = 0.0;
    double smle_variance = 0.0;
    std::optional<double> wva;  // empty when no trial hit the post-selected outcome
    double wva_variance = 0.0;  // exact conditional variance
    double d_null = 0.0;
    double d_alt = 0.0;
    bool reject_null = false;
    bool reject_alt = false;
};

struct EstimatorStats {
    EstimatorKind estimator = EstimatorKind::Mle;
    std::size_t count = 0;
    double emp_mean = 0.0;
    double emp_var = 0.0;
    double mean_analytic_var = 0.0;
    double emp_mse = 0.0;
};

struct DetectionStats {
    double mean_d_null = 0.0;
    double mean_d_alt = 0.0;
    /// Fraction of alternative (x = x_true) datasets rejected: the power.
    double reject_rate = 0.0;
    /// Fraction of null datasets rejected: the realized size.
    double reject_rate_null = 0.0;
    double alpha = 0.05;
    int dof = 1;
    double threshold = 0.0;
};

struct RunResult {
    std::string sweep_param;
    std::optional<double> sweep_value;
    std::array<EstimatorStats, 3> estimators{};
    DetectionStats detection;
    std::size_t trials = 0;
    double mean_n_check = 0.0;
    std::size_t skipped_trials = 0;  // WVA undefined (N_chk = 0)
    double skipped_fraction = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    bool weak_regime_warning = false;
    double wall_seconds = 0.0;  // never serialized
};

struct RunOptions {
    /// 0 means hardware concurrency. WVA_BENCH_THREADS caps either choice.
    std::size_t workers = 0;
};

/// Worker count after applying the WVA_BENCH_THREADS cap.
std::size_t resolve_workers(std::size_t requested);

/// Simulates every trial; record t depends only on (config, t).
std::vector<TrialRecord> simulate_trials(const ExperimentConfig &config, const RunOptions &options = {});

RunResult aggregate(const ExperimentConfig &config, const std::vector<TrialRecord> &records);

RunResult run_experiment(const ExperimentConfig &config, const RunOptions &options = {});

/// Copy of `config` with the sweep parameter set to `value` (no sweep).
ExperimentConfig config_at(const ExperimentConfig &config, const std::string &param, double value);

/// One RunResult per sweep value, in order. Point k runs with seed
/// derive_trial_seed(config.seed, k).
std::vector<RunResult> sweep(const ExperimentConfig &config, const RunOptions &options = {});

/// QfiReports for the fisher mode: the explicit model if configured,
/// otherwise `random_instances` random models seeded per instance.
std::vector<QfiReport> run_fisher(const ExperimentConfig &config);

}  // namespace wvabench
