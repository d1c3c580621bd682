#include <benchmark/benchmark.h>

#include <vector>

#include "corrcast/rng.hpp"
#include "corrcast/stats.hpp"

using namespace corrcast;

namespace {

std::vector<double> noise(size_t n, uint64_t seed) {
    Rng rng = Rng::fork(seed, "bench-stats");
    std::vector<double> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(rng.normal());
    return out;
}

CorrelationSeries monthly(int months, uint64_t seed) {
    Rng rng = Rng::fork(seed, "bench-series");
    CorrelationSeries out;
    MonthKey m{1980, 1};
    for (int k = 0; k < months; ++k) {
        out.values[m] = 0.5 * rng.uniform(-1.0, 1.0);
        m = add_months(m, 1);
    }
    return out;
}

void BM_StudentTCdf(benchmark::State& state) {
    double t = -4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(student_t_cdf(t, 17.5));
        t += 1e-6;
    }
}
BENCHMARK(BM_StudentTCdf);

void BM_OneSidedTTest(benchmark::State& state) {
    const auto a = noise(static_cast<size_t>(state.range(0)), 23);
    const auto b = noise(static_cast<size_t>(state.range(0)), 24);
    for (auto _ : state)
        benchmark::DoNotOptimize(one_sided_t_test(a, b, Alternative::ALess));
}
BENCHMARK(BM_OneSidedTTest)->RangeMultiplier(8)->Range(64, 4096);

void BM_RmseWindows(benchmark::State& state) {
    const CorrelationSeries predicted = monthly(500, 25);
    const CorrelationSeries realized = monthly(500, 26);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(rmse_windows(predicted, realized, n,
                                              MonthKey{1980, 1},
                                              MonthKey{2021, 8}));
}
BENCHMARK(BM_RmseWindows)->Arg(1)->Arg(3)->Arg(6)->Arg(12);

void BM_ExperimentLookahead(benchmark::State& state) {
    const CorrelationSeries realized = monthly(500, 27);
    const CorrelationSeries predicted = monthly(500, 28);
    const VariantSeries variants{{predicted, predicted, predicted}};
    PeriodSplit split;
    split.train_first = MonthKey{1980, 1};
    split.train_last = MonthKey{2009, 12};
    split.test_first = MonthKey{2010, 1};
    split.test_last = MonthKey{2021, 8};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            experiment_lookahead(variants, realized, split, "bench"));
}
BENCHMARK(BM_ExperimentLookahead);

} // namespace
