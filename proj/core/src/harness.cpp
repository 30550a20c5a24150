#include "wvabench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "wvabench/detection.hpp"
#include "wvabench/errors.hpp"
#include "wvabench/noise.hpp"
#include "wvabench/seeding.hpp"

namespace wvabench {

std::size_t resolve_workers(std::size_t requested) {
    std::size_t n = requested;
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("WVA_BENCH_THREADS")) {
        char *end = nullptr;
        const unsigned long long cap = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<std::size_t>(n, cap);
    }
    return n;
}

namespace {

/// Everything a trial needs that does not depend on the trial index.
struct TrialContext {
    OutcomeTable table;
    GaussianMetric metric;
    CorrelatedGaussianSampler noise;
    double x;
    double sigma;
    std::size_t n;
    int check;
    double ow_check;
    double threshold;
    std::uint64_t seed;
};

TrialContext make_context(const ExperimentConfig &config) {
    const CouplingConfig &c = config.coupling;
    OutcomeTable table = outcome_table(c.observable(), c.initial_state(), c.basis());
    const NoiseCovariance cov = config.covariance();
    const int dof = config.per_sample_dof ? static_cast<int>(config.n_per_trial) : 1;
    const double ow_check = table.weak_values(config.postselect_outcome);
    return TrialContext{std::move(table),
                        GaussianMetric(cov, c.meter().sigma()),
                        CorrelatedGaussianSampler(cov),
                        c.x_true(),
                        c.meter().sigma(),
                        config.n_per_trial,
                        config.postselect_outcome,
                        ow_check,
                        chi2_upper_quantile(dof, config.alpha),
                        config.seed};
}

Dataset draw(const TrialContext &ctx, double x, Rng &rng) {
    JointSample s = sample_joint(ctx.table, x, ctx.sigma, ctx.n, rng);
    RVector readings = s.meter + ctx.noise(rng);
    return Dataset{std::move(s.outcomes), std::move(readings)};
}

TrialRecord run_trial(const TrialContext &ctx, std::size_t t) {
    Rng rng(derive_trial_seed(ctx.seed, t));
    const Dataset alt = draw(ctx, ctx.x, rng);
    const Dataset null = draw(ctx, 0.0, rng);
    const RVector ow = weak_value_sequence(ctx.table.weak_values, alt.outcomes);
    const RVector ow_null = weak_value_sequence(ctx.table.weak_values, null.outcomes);

    TrialRecord r;
    r.n_check = static_cast<std::size_t>(std::count(alt.outcomes.begin(), alt.outcomes.end(), ctx.check));
    const EstimateReport m = mle(alt, ow, ctx.metric);
    r.mle = m.estimate;
    r.mle_variance = m.analytic_variance;
    const EstimateReport s = smle(alt, ow, ctx.metric);
    r.smle = s.estimate;
    r.smle_variance = s.analytic_variance;
    if (r.n_check > 0) {
        const EstimateReport w = wva(alt, ctx.check, ctx.ow_check, ctx.metric);
        r.wva = w.estimate;
        r.wva_variance = w.exact_variance();
    }
    r.d_alt = lr_statistic(alt, ow, ctx.metric);
    r.d_null = lr_statistic(null, ow_null, ctx.metric);
    r.reject_alt = r.d_alt > ctx.threshold;
    r.reject_null = r.d_null > ctx.threshold;
    return r;
}

/// Accumulates one estimator's statistics in trial order.
struct Moments {
    std::size_t count = 0;
    double sum = 0.0;
    double sum_analytic = 0.0;
    double sum_sq_err = 0.0;
    std::vector<double> values;

    void add(double v, double analytic, double truth) {
        ++count;
        sum += v;
        sum_analytic += analytic;
        sum_sq_err += (v - truth) * (v - truth);
        values.push_back(v);
    }

    EstimatorStats finish(EstimatorKind kind) const {
        EstimatorStats out;
        out.estimator = kind;
        out.count = count;
        if (count == 0) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            out.emp_mean = out.emp_var = out.mean_analytic_var = out.emp_mse = nan;
            return out;
        }
        const auto n = static_cast<double>(count);
        out.emp_mean = sum / n;
        double ss = 0.0;
        for (double v : values) ss += (v - out.emp_mean) * (v - out.emp_mean);
        out.emp_var = count > 1 ? ss / (n - 1.0) : 0.0;
        out.mean_analytic_var = sum_analytic / n;
        out.emp_mse = sum_sq_err / n;
        return out;
    }
};

}  // namespace

std::vector<TrialRecord> simulate_trials(const ExperimentConfig &config, const RunOptions &options) {
    validate(config);
    const TrialContext ctx = make_context(config);
    std::vector<TrialRecord> records(config.trials);
    const std::size_t workers = std::min(resolve_workers(options.workers), config.trials);

    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_trial = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;

    auto work = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= records.size()) return;
            try {
                records[t] = run_trial(ctx, t);
            } catch (...) {
                // Keep the lowest failing index so the reported error does
                // not depend on scheduling.
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (t < failed_trial) {
                    failed_trial = t;
                    failure = std::current_exception();
                }
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto &th : pool) th.join();
    }

    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const ModelError &e) {
            raise(e.kind(), "trial " + std::to_string(failed_trial) + ": " + e.detail());
        }
    }
    return records;
}

RunResult aggregate(const ExperimentConfig &config, const std::vector<TrialRecord> &records) {
    const double truth = config.coupling.x_true();
    Moments m_mle, m_smle, m_wva;
    double sum_d_null = 0.0, sum_d_alt = 0.0, sum_n_check = 0.0;
    std::size_t rej_alt = 0, rej_null = 0, skipped = 0;
    for (const TrialRecord &r : records) {
        m_mle.add(r.mle, r.mle_variance, truth);
        m_smle.add(r.smle, r.smle_variance, truth);
        if (r.wva) {
            m_wva.add(*r.wva, r.wva_variance, truth);
        } else {
            ++skipped;
        }
        sum_d_null += r.d_null;
        sum_d_alt += r.d_alt;
        sum_n_check += static_cast<double>(r.n_check);
        rej_alt += r.reject_alt ? 1 : 0;
        rej_null += r.reject_null ? 1 : 0;
    }

    RunResult out;
    out.trials = records.size();
    out.estimators = {m_mle.finish(EstimatorKind::Mle), m_smle.finish(EstimatorKind::Smle),
                      m_wva.finish(EstimatorKind::Wva)};
    const auto n = static_cast<double>(std::max<std::size_t>(records.size(), 1));
    out.detection.mean_d_null = sum_d_null / n;
    out.detection.mean_d_alt = sum_d_alt / n;
    out.detection.reject_rate = static_cast<double>(rej_alt) / n;
    out.detection.reject_rate_null = static_cast<double>(rej_null) / n;
    out.detection.alpha = config.alpha;
    out.detection.dof = config.per_sample_dof ? static_cast<int>(config.n_per_trial) : 1;
    out.detection.threshold = chi2_upper_quantile(out.detection.dof, config.alpha);
    out.mean_n_check = sum_n_check / n;
    out.skipped_trials = skipped;
    out.skipped_fraction = static_cast<double>(skipped) / n;
    out.seed = config.seed;
    out.config_hash = config_hash(config);
    out.weak_regime_warning = config.coupling.weak_regime_warning();
    return out;
}

RunResult run_experiment(const ExperimentConfig &config, const RunOptions &options) {
    const auto start = std::chrono::steady_clock::now();
    RunResult out = aggregate(config, simulate_trials(config, options));
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

ExperimentConfig config_at(const ExperimentConfig &config, const std::string &param, double value) {
    ExperimentConfig out = config;
    out.sweep.reset();
    const CouplingConfig &c = config.coupling;
    const std::string key = "sweep.values";
    if (!std::isfinite(value)) raise(ErrorKind::ConfigError, key + ": values must be finite");
    try {
        if (param == "sigma") {
            out.coupling = CouplingConfig(c.observable(), c.initial_state(), c.basis(), MeterSpec(value), c.x_true());
        } else if (param == "x_true") {
            out.coupling = CouplingConfig(c.observable(), c.initial_state(), c.basis(), c.meter(), value);
        } else if (param == "theta") {
            if (c.observable().dim() != 2) raise(ErrorKind::ConfigError, "sweep.param: theta needs a qubit");
            out.coupling = CouplingConfig(c.observable(), qubit_state(value), c.basis(), c.meter(), c.x_true());
        } else if (param == "n_per_trial") {
            if (!(value >= 1.0) || value != std::floor(value)) {
                raise(ErrorKind::ConfigError, key + ": n_per_trial values must be positive integers");
            }
            out.n_per_trial = static_cast<std::size_t>(value);
        } else {
            raise(ErrorKind::ConfigError, "sweep.param: expected sigma, x_true, n_per_trial or theta");
        }
    } catch (const ModelError &e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        raise(ErrorKind::ConfigError, key + ": " + e.what());
    }
    validate(out);
    return out;
}

std::vector<RunResult> sweep(const ExperimentConfig &config, const RunOptions &options) {
    if (!config.sweep) raise(ErrorKind::ConfigError, "sweep.param: no sweep configured");
    const SweepSpec &spec = *config.sweep;
    if (spec.values.empty()) raise(ErrorKind::ConfigError, "sweep.values: value list is empty");
    std::vector<RunResult> out;
    out.reserve(spec.values.size());
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
        ExperimentConfig point = config_at(config, spec.param, spec.values[k]);
        point.seed = derive_trial_seed(config.seed, k);
        RunResult r = run_experiment(point, options);
        r.sweep_param = spec.param;
        r.sweep_value = spec.values[k];
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<QfiReport> run_fisher(const ExperimentConfig &config) {
    const FisherSpec &f = config.fisher;
    std::vector<QfiReport> out;
    if (f.hamiltonian) {
        if (!f.meter_state) raise(ErrorKind::ConfigError, "fisher.meter_state: required with fisher.hamiltonian");
        const CouplingConfig &c = config.coupling;
        JointModel model(*f.hamiltonian, c.initial_state(), PureState(*f.meter_state), c.basis(), f.x);
        out.push_back(fi_decomposition(model));
        return out;
    }
    out.reserve(f.random_instances);
    for (std::size_t k = 0; k < f.random_instances; ++k) {
        Rng rng(derive_trial_seed(config.seed, k));
        out.push_back(fi_decomposition(random_joint_model(f.random_dim_a, f.random_dim_b, rng)));
    }
    return out;
}

}  // namespace wvabench
