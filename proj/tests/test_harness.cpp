#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wvabench/emit.hpp"
#include "wvabench/errors.hpp"
#include "wvabench/harness.hpp"

using namespace wvabench;

namespace {

std::string qubit_config(double theta, double sigma, const std::string &noise, double x, int n, int trials,
                         std::uint64_t seed = 11) {
    std::ostringstream s;
    s.precision(17);
    s << "system.dimension = 2\n"
      << "system.observable = [1, 0, 0, -1]\n"
      << "system.theta = " << theta << "\n"
      << "system.basis = [[0.7071067811865476, -0.7071067811865476], [0.7071067811865476, 0.7071067811865476]]\n"
      << "meter.sigma = " << sigma << "\n"
      << noise << "\n"
      << "run.x_true = " << x << "\n"
      << "run.n_per_trial = " << n << "\n"
      << "run.trials = " << trials << "\n"
      << "run.postselect_outcome = 0\n"
      << "run.seed = " << seed << "\n";
    return s.str();
}

const double kPi8 = std::numbers::pi / 8.0;

struct DumpRow {
    std::size_t n_check;
    double mle, mle_var, smle, smle_var;
    bool has_wva;
    double wva, wva_var, d_null, d_alt;
    int reject_null, reject_alt;
};

std::vector<DumpRow> parse_dump(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "trial,n_check,mle,mle_var,smle,smle_var,wva,wva_var,d_null,d_alt,reject_null,reject_alt");
    std::vector<DumpRow> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        EXPECT_EQ(f.size(), 12u) << line;
        DumpRow r{};
        r.n_check = std::stoul(f[1]);
        r.mle = std::stod(f[2]);
        r.mle_var = std::stod(f[3]);
        r.smle = std::stod(f[4]);
        r.smle_var = std::stod(f[5]);
        r.has_wva = !f[6].empty();
        if (r.has_wva) {
            r.wva = std::stod(f[6]);
            r.wva_var = std::stod(f[7]);
        }
        r.d_null = std::stod(f[8]);
        r.d_alt = std::stod(f[9]);
        r.reject_null = std::stoi(f[10]);
        r.reject_alt = std::stoi(f[11]);
        rows.push_back(r);
    }
    return rows;
}

void expect_close(double a, double b, const char *what) {
    EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b))) << what << ": " << a << " vs " << b;
}

}  // namespace

TEST(Harness, NullSignalMeansAreZero) {
    const ExperimentConfig c = parse_config(qubit_config(kPi8, 1.0, "noise.kind = white\nnoise.params = [0]", 0.0, 10, 10000));
    const RunResult r = run_experiment(c);
    for (const EstimatorStats &e : r.estimators) {
        ASSERT_GT(e.count, 1u);
        const double se = std::sqrt(e.emp_var / static_cast<double>(e.count));
        EXPECT_LT(std::abs(e.emp_mean), 4.0 * se) << to_string(e.estimator);
        EXPECT_GE(e.emp_mse, 0.0);
    }
    EXPECT_GE(r.detection.reject_rate, 0.0);
    EXPECT_LE(r.detection.reject_rate, 1.0);
}

TEST(Harness, DeterministicAcrossWorkerCounts) {
    const ExperimentConfig c = parse_config(qubit_config(kPi8, 10.0, "noise.kind = constant\nnoise.params = [0.01]", 0.1, 40, 600));
    const std::string one = results_csv({run_experiment(c, RunOptions{1})});
    EXPECT_EQ(one, results_csv({run_experiment(c, RunOptions{3})}));
    EXPECT_EQ(one, results_csv({run_experiment(c, RunOptions{8})}));
    EXPECT_EQ(results_jsonl({run_experiment(c, RunOptions{1})}), results_jsonl({run_experiment(c, RunOptions{5})}));
}

TEST(Harness, AggregatesMatchTrialDump) {
    const ExperimentConfig c = parse_config(qubit_config(0.6, 3.0, "noise.kind = ar1\nnoise.params = [0.5, 0.4]", 0.4, 20, 3000));
    const auto records = simulate_trials(c, RunOptions{2});
    const RunResult r = aggregate(c, records);
    const auto rows = parse_dump(trial_dump_csv(records));
    ASSERT_EQ(rows.size(), c.trials);

    // Two-pass recomputation in long double, independent of the library reducer.
    auto check = [&](EstimatorKind kind, auto value, auto variance, auto present) {
        long double s = 0, sv = 0, se = 0;
        std::size_t n = 0;
        for (const auto &row : rows) {
            if (!present(row)) continue;
            s += value(row);
            sv += variance(row);
            se += (value(row) - 0.4L) * (value(row) - 0.4L);
            ++n;
        }
        const long double mean = s / n;
        long double ss = 0;
        for (const auto &row : rows)
            if (present(row)) ss += (value(row) - mean) * (value(row) - mean);
        const EstimatorStats &e = r.estimators[static_cast<int>(kind)];
        EXPECT_EQ(e.count, n);
        expect_close(e.emp_mean, static_cast<double>(mean), "emp_mean");
        expect_close(e.emp_var, static_cast<double>(ss / (n - 1)), "emp_var");
        expect_close(e.mean_analytic_var, static_cast<double>(sv / n), "analytic_var");
        expect_close(e.emp_mse, static_cast<double>(se / n), "emp_mse");
    };
    auto always = [](const DumpRow &) { return true; };
    check(EstimatorKind::Mle, [](const DumpRow &d) { return (long double)d.mle; },
          [](const DumpRow &d) { return (long double)d.mle_var; }, always);
    check(EstimatorKind::Smle, [](const DumpRow &d) { return (long double)d.smle; },
          [](const DumpRow &d) { return (long double)d.smle_var; }, always);
    check(EstimatorKind::Wva, [](const DumpRow &d) { return (long double)d.wva; },
          [](const DumpRow &d) { return (long double)d.wva_var; }, [](const DumpRow &d) { return d.has_wva; });

    long double dn = 0, da = 0, nc = 0;
    int rn = 0, ra = 0;
    std::size_t skipped = 0;
    for (const auto &row : rows) {
        dn += row.d_null;
        da += row.d_alt;
        nc += row.n_check;
        rn += row.reject_null;
        ra += row.reject_alt;
        skipped += row.has_wva ? 0 : 1;
        EXPECT_EQ(row.has_wva, row.n_check > 0);
    }
    const double t = static_cast<double>(rows.size());
    expect_close(r.detection.mean_d_null, static_cast<double>(dn / t), "mean_d_null");
    expect_close(r.detection.mean_d_alt, static_cast<double>(da / t), "mean_d_alt");
    expect_close(r.detection.reject_rate, ra / t, "reject_rate");
    expect_close(r.detection.reject_rate_null, rn / t, "reject_rate_null");
    expect_close(r.mean_n_check, static_cast<double>(nc / t), "mean_n_check");
    EXPECT_EQ(r.skipped_trials, skipped);
}

TEST(Harness, SkippedTrialAccounting) {
    // p(check) is about 0.007, so most 20-reading trials never post-select.
    const ExperimentConfig c = parse_config(qubit_config(0.7, 1.0, "noise.kind = white\nnoise.params = [0]", 0.1, 20, 2000));
    const RunResult r = run_experiment(c);
    EXPECT_GT(r.skipped_trials, 0u);
    EXPECT_EQ(r.estimators[0].count, r.trials);
    EXPECT_EQ(r.estimators[1].count, r.trials);
    EXPECT_EQ(r.estimators[2].count + r.skipped_trials, r.trials);
    EXPECT_DOUBLE_EQ(r.skipped_fraction, static_cast<double>(r.skipped_trials) / r.trials);
}

TEST(Harness, AllTrialsSkippedLeavesWvaEmpty) {
    const ExperimentConfig c = parse_config(qubit_config(0.785, 1.0, "noise.kind = white\nnoise.params = [0]", 0.1, 1, 50));
    const RunResult r = run_experiment(c);
    if (r.skipped_trials != r.trials) GTEST_SKIP() << "a trial post-selected";
    EXPECT_EQ(r.estimators[2].count, 0u);
    EXPECT_TRUE(std::isnan(r.estimators[2].emp_mean));
    const std::string csv = results_csv({r});
    EXPECT_NE(csv.find("\n,,wva,,,,,,,,"), std::string::npos) << csv;
}

TEST(Harness, ModelErrorsCarryTrialIndex) {
    // O = diag(1, 0) measured in the computational basis: outcome 1 has weak
    // value 0, so a trial drawing only outcome 1 carries no information.
    const std::string text = R"(
system.dimension = 2
system.observable = [1, 0, 0, 0]
system.theta = 1.4
system.basis = [[1, 0], [0, 1]]
meter.sigma = 1
run.x_true = 0.1
run.n_per_trial = 3
run.trials = 200
run.postselect_outcome = 0
run.seed = 5
)";
    const ExperimentConfig c = parse_config(text);
    std::string first;
    for (std::size_t workers : {1, 4}) {
        try {
            run_experiment(c, RunOptions{workers});
            FAIL() << "expected ZeroInformation";
        } catch (const ModelError &e) {
            EXPECT_EQ(e.kind(), ErrorKind::ZeroInformation);
            EXPECT_EQ(e.detail().rfind("trial ", 0), 0u) << e.detail();
            if (first.empty()) first = e.detail();
            EXPECT_EQ(e.detail(), first);
        }
    }
}

TEST(Harness, DeskOrderingAtReducedScale) {
    const ExperimentConfig c =
        parse_config(qubit_config(kPi8, 10.0, "noise.kind = constant\nnoise.params = [0.01]", 0.1, 100, 4000));
    const auto records = simulate_trials(c);
    std::vector<double> d_ms, d_sw;
    for (const auto &t : records) {
        d_ms.push_back((t.mle - 0.1) * (t.mle - 0.1) - (t.smle - 0.1) * (t.smle - 0.1));
        if (t.wva) d_sw.push_back((t.smle - 0.1) * (t.smle - 0.1) - (*t.wva - 0.1) * (*t.wva - 0.1));
    }
    const auto a = oracle::mean_se(d_ms);
    const auto b = oracle::mean_se(d_sw);
    EXPECT_LE(a.mean, 3.0 * a.se);
    EXPECT_LE(b.mean, 3.0 * b.se);
}

TEST(Sweep, OrderSeedsAndLabels) {
    ExperimentConfig c = parse_config(qubit_config(kPi8, 10.0, "noise.kind = white\nnoise.params = [0]", 0.1, 10, 50, 99) +
                                      "sweep.param = x_true\nsweep.values = [0.3, 0.1, 0.2]\n");
    const auto results = sweep(c);
    ASSERT_EQ(results.size(), 3u);
    const double values[] = {0.3, 0.1, 0.2};
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(results[k].sweep_param, "x_true");
        EXPECT_EQ(*results[k].sweep_value, values[k]);
        EXPECT_EQ(results[k].seed, derive_trial_seed(99, k));
    }
    // A point is exactly the single run of its derived config.
    ExperimentConfig point = config_at(c, "x_true", 0.1);
    point.seed = derive_trial_seed(99, 1);
    const RunResult single = run_experiment(point);
    EXPECT_EQ(single.estimators[0].emp_mean, results[1].estimators[0].emp_mean);
}

TEST(Sweep, Errors) {
    ExperimentConfig c = parse_config(qubit_config(kPi8, 10.0, "noise.kind = white\nnoise.params = [0]", 0.1, 10, 5));
    EXPECT_THROW(sweep(c), ModelError);
    c.sweep = SweepSpec{"sigma", {}};
    try {
        sweep(c);
        FAIL();
    } catch (const ModelError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
    EXPECT_THROW(config_at(c, "n_per_trial", 2.5), ModelError);
    EXPECT_THROW(config_at(c, "sigma", -1.0), ModelError);
    EXPECT_THROW(config_at(c, "theta", std::numbers::pi / 4), ModelError);
}

TEST(Sweep, SmleGapShrinksWithSigma) {
    // constant(0.01) on N = 100 has Frobenius norm 1.
    const ExperimentConfig c =
        parse_config(qubit_config(kPi8, 2.0, "noise.kind = constant\nnoise.params = [0.01]", 0.1, 100, 300) +
                     "sweep.param = sigma\nsweep.values = [2, 4, 8, 16, 32]\n");
    const auto results = sweep(c);
    double prev = INFINITY;
    for (const auto &r : results) {
        const double gap = (r.estimators[1].mean_analytic_var - r.estimators[0].mean_analytic_var) /
                           r.estimators[0].mean_analytic_var;
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(Sweep, ThetaTowardOrthogonality) {
    // As |<-|i>| -> 0 the post-selected weak value grows and N_chk falls.
    // The wva MSE over trials with N_chk >= 1 follows the exact binomial
    // oracle sigma^2 E[1/N_chk | N_chk >= 1] / O_w^2, which is not monotone.
    const double sigma = 10.0;
    const int n = 100;
    const ExperimentConfig c =
        parse_config(qubit_config(0.2, sigma, "noise.kind = white\nnoise.params = [0]", 0.1, n, 4000) +
                     "sweep.param = theta\nsweep.values = [0.2, 0.4, 0.6, 0.7]\n");
    const auto results = sweep(c);
    double prev_n = INFINITY, prev_w = 0.0, prev_skip = -1.0;
    for (const auto &r : results) {
        const double th = *r.sweep_value;
        const double w = oracle::qubit_minus_weak_value(th);
        EXPECT_LT(r.mean_n_check, prev_n);
        EXPECT_GT(w, prev_w);
        EXPECT_GE(r.skipped_fraction, prev_skip);
        prev_n = r.mean_n_check;
        prev_w = w;
        prev_skip = r.skipped_fraction;

        const double p = std::pow(std::cos(th) - std::sin(th), 2) / 2.0;
        double mass = 0.0, inv = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double pk = oracle::binomial_upper_tail(n, p, k) - oracle::binomial_upper_tail(n, p, k + 1);
            mass += pk;
            inv += pk / k;
        }
        const double oracle_mse = sigma * sigma * (inv / mass) / (w * w);
        ExperimentConfig point = config_at(c, "theta", th);
        point.seed = r.seed;
        std::vector<double> sq;
        for (const auto &t : simulate_trials(point))
            if (t.wva) sq.push_back((*t.wva - 0.1) * (*t.wva - 0.1));
        const auto ms = oracle::mean_se(sq);
        const EstimatorStats &e = r.estimators[2];
        EXPECT_DOUBLE_EQ(e.emp_mse, ms.mean);
        const double se = ms.se;
        EXPECT_NEAR(e.emp_mse, oracle_mse, 4.0 * se) << "theta=" << th;
    }
}

TEST(Workers, EnvironmentCap) {
    ::setenv("WVA_BENCH_THREADS", "2", 1);
    EXPECT_EQ(resolve_workers(8), 2u);
    EXPECT_EQ(resolve_workers(1), 1u);
    EXPECT_LE(resolve_workers(0), 2u);
    ::setenv("WVA_BENCH_THREADS", "junk", 1);
    EXPECT_EQ(resolve_workers(8), 8u);
    ::unsetenv("WVA_BENCH_THREADS");
    EXPECT_GE(resolve_workers(0), 1u);
}

TEST(Fisher, RandomInstancesFromConfig) {
    const ExperimentConfig c = parse_config("run.mode = fisher\nfisher.dim_a = 3\nfisher.dim_b = 2\n"
                                            "fisher.random_instances = 20\nrun.seed = 4\n");
    const auto reports = run_fisher(c);
    ASSERT_EQ(reports.size(), 20u);
    for (const auto &q : reports) EXPECT_TRUE(q.chain_holds);
    EXPECT_EQ(qfi_jsonl(reports), qfi_jsonl(run_fisher(c)));
}

TEST(Fisher, ExplicitModelFromConfig) {
    const std::string text = R"(
run.mode = fisher
system.dimension = 2
system.observable = [1, 0, 0, -1]
system.initial_state = [0.7071067811865476, 0.7071067811865476]
system.basis = [[0.7071067811865476, 0.7071067811865476], [0.7071067811865476, -0.7071067811865476]]
meter.sigma = 1
run.x_true = 0
fisher.dim_b = 2
fisher.hamiltonian = [0, 1, 0, 0,  1, 0, 0, 0,  0, 0, 0, -1,  0, 0, -1, 0]
fisher.meter_state = [1, 0]
fisher.x = 0
)";
    const auto reports = run_fisher(parse_config(text));
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_NEAR(reports[0].i_ab, 4.0, 1e-10);
    EXPECT_TRUE(reports[0].chain_holds);
}
