#include <benchmark/benchmark.h>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "corrcast/portfolio.hpp"
#include "corrcast/rng.hpp"

using namespace corrcast;

namespace {

// Random volatilities plus a consistent correlation structure for N assets.
std::pair<std::vector<std::pair<std::string, double>>,
          std::map<std::pair<std::string, std::string>, double>>
random_inputs(int n, uint64_t seed) {
    Rng rng = Rng::fork(seed, "bench-portfolio");
    std::vector<std::pair<std::string, double>> vols;
    for (int i = 0; i < n; ++i)
        vols.emplace_back("a" + std::to_string(i), rng.uniform(0.05, 0.4));
    std::map<std::pair<std::string, std::string>, double> corr;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            corr[{vols[i].first, vols[j].first}] = rng.uniform(-0.5, 0.5);
    return {vols, corr};
}

void BM_TwoAssetWeight(benchmark::State& state) {
    Rng rng = Rng::fork(17, "bench-two-asset");
    const double sigma_s = rng.uniform(0.1, 0.3);
    const double sigma_b = rng.uniform(0.05, 0.2);
    const double rho = rng.uniform(-0.8, 0.8);
    for (auto _ : state)
        benchmark::DoNotOptimize(two_asset_weight(sigma_s, sigma_b, rho));
}
BENCHMARK(BM_TwoAssetWeight);

void BM_AssembleCovariance(benchmark::State& state) {
    const auto [vols, corr] = random_inputs(static_cast<int>(state.range(0)), 18);
    for (auto _ : state) {
        CovarianceMatrix cov = assemble_covariance(vols, corr);
        benchmark::DoNotOptimize(cov.entries.data());
    }
}
BENCHMARK(BM_AssembleCovariance)->DenseRange(2, 6);

void BM_NAssetWeights(benchmark::State& state) {
    const auto [vols, corr] = random_inputs(static_cast<int>(state.range(0)), 19);
    const CovarianceMatrix cov = assemble_covariance(vols, corr);
    for (auto _ : state) {
        WeightVector w = n_asset_weights(cov);
        benchmark::DoNotOptimize(w.weights.data());
    }
}
BENCHMARK(BM_NAssetWeights)->DenseRange(2, 6);

void BM_ScaleWeights(benchmark::State& state) {
    const auto [vols, corr] = random_inputs(2, 20);
    const CovarianceMatrix cov = assemble_covariance(vols, corr);
    const WeightVector w = n_asset_weights(cov);
    const double vol = portfolio_volatility(cov, w.weights);
    for (auto _ : state)
        benchmark::DoNotOptimize(scale_weights(w.weights(0), w.weights(1), 0.10,
                                               vol * 15.87));
}
BENCHMARK(BM_ScaleWeights);

} // namespace

BENCHMARK_MAIN();
