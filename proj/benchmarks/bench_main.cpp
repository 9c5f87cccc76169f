#include <vector>

#include <benchmark/benchmark.h>

#include "entdyn/haar.hpp"
#include "entdyn/models.hpp"
#include "entdyn/quantum_sim.hpp"
#include "entdyn/spectral.hpp"
#include "entdyn/symgroup.hpp"

using namespace entdyn;

static void BM_WeingartenTable(benchmark::State& state) {
    const int q = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(weingarten_table(q + 3, q));
}
BENCHMARK(BM_WeingartenTable)->DenseRange(2, 8, 2);

static void BM_HaarMoment(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(haar_average_moment(n, 2, 2));
}
BENCHMARK(BM_HaarMoment)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_ChiMean(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(chi_mean(d, 0.7));
}
BENCHMARK(BM_ChiMean)->RangeMultiplier(4)->Range(4, 256);

static void BM_XiMean(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(xi_mean(d, 0.7));
}
BENCHMARK(BM_XiMean)->RangeMultiplier(4)->Range(4, 256);

static void BM_BuildSyk(benchmark::State& state) {
    ModelSpec spec;
    spec.family = ModelFamily::SYK;
    spec.s_A = 3;
    spec.s_B = static_cast<int>(state.range(0)) - 3;
    std::uint64_t i = 0;
    for (auto _ : state) {
        RngStream rng(1, i++);
        benchmark::DoNotOptimize(build_model(spec, rng));
    }
}
BENCHMARK(BM_BuildSyk)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_McSample(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    std::vector<double> times;
    for (int k = 0; k <= 600; ++k) times.push_back(0.01 * k);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        McOptions opt;
        opt.seed = seed++;
        benchmark::DoNotOptimize(mc_average(gue_generator(d), 2, d / 2, times, 1, opt));
    }
}
BENCHMARK(BM_McSample)->RangeMultiplier(4)->Range(4, 256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
