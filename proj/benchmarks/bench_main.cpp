#include <benchmark/benchmark.h>

#include <random>

#include "wvabench/config.hpp"
#include "wvabench/detection.hpp"
#include "wvabench/estimators.hpp"
#include "wvabench/fisher.hpp"
#include "wvabench/harness.hpp"
#include "wvabench/linalg.hpp"
#include "wvabench/noise.hpp"

using namespace wvabench;

namespace {

void BM_Expm(benchmark::State &state) {
    Rng rng(1);
    const CMatrix h = random_hermitian(state.range(0), rng);
    for (auto _ : state) benchmark::DoNotOptimize(unitary_evolution(h, 0.7));
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(16);

void BM_GaussianMetric(benchmark::State &state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const NoiseCovariance k = build_covariance(CovarianceKind::Ar1, std::vector<double>{0.25, 0.5}, n);
    for (auto _ : state) benchmark::DoNotOptimize(GaussianMetric(k, 10.0));
}
BENCHMARK(BM_GaussianMetric)->Arg(100)->Arg(400);

void BM_Estimators(benchmark::State &state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const NoiseCovariance k = build_covariance(CovarianceKind::Ar1, std::vector<double>{0.25, 0.5}, n);
    const GaussianMetric metric(k, 10.0);
    Rng rng(2);
    std::normal_distribution<double> g;
    std::vector<int> f(static_cast<std::size_t>(n));
    RVector ow(n), r(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        f[static_cast<std::size_t>(j)] = j % 7 == 0 ? 0 : 1;
        ow(j) = j % 7 == 0 ? 2.4 : 0.41;
        r(j) = g(rng);
    }
    const Dataset data{f, r};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mle(data, ow, metric));
        benchmark::DoNotOptimize(smle(data, ow, metric));
        benchmark::DoNotOptimize(lr_statistic(data, ow, metric));
    }
}
BENCHMARK(BM_Estimators)->Arg(100)->Arg(400);

void BM_NoiseSampling(benchmark::State &state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const CorrelatedGaussianSampler sampler(
        build_covariance(CovarianceKind::Ar1, std::vector<double>{0.25, 0.5}, n));
    Rng rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(sampler(rng));
}
BENCHMARK(BM_NoiseSampling)->Arg(100)->Arg(400);

void BM_DeskTrials(benchmark::State &state) {
    ExperimentConfig config = load_config(std::string(WVABENCH_TEST_DATA) + "/desk.cfg");
    config.trials = 1000;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_trials(config, RunOptions{1}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.trials));
}
BENCHMARK(BM_DeskTrials)->Unit(benchmark::kMillisecond);

void BM_FiDecomposition(benchmark::State &state) {
    Rng rng(4);
    const JointModel model = random_joint_model(state.range(0), state.range(0), rng);
    for (auto _ : state) benchmark::DoNotOptimize(fi_decomposition(model));
}
BENCHMARK(BM_FiDecomposition)->Arg(2)->Arg(4);

}  // namespace
BENCHMARK_MAIN();
