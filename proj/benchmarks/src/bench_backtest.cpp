#include <benchmark/benchmark.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corrcast/backtest.hpp"
#include "corrcast/market_data.hpp"

#include "bench_support.hpp"

using namespace corrcast;
using corrcast::bench::walk_prices;
using corrcast::bench::weekdays;

namespace {

std::optional<double> month_rho(const std::string&, const std::string&,
                                const MonthKey& month,
                                const std::vector<double>&) {
    return (static_cast<double>(month.month % 5) - 2.0) / 4.0;
}

void BM_EwmaVolatility(benchmark::State& state) {
    const std::vector<Date> dates = weekdays({2010, 1, 1}, {2019, 12, 31});
    const ReturnSeries returns =
        to_returns(walk_prices("s", dates, 100.0, 0.01, 31));
    const Date as_of{2019, 12, 31};
    const int span = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(ewma_volatility(returns, span, as_of));
}
BENCHMARK(BM_EwmaVolatility)->Arg(20)->Arg(60)->Arg(120);

void BM_RunBacktest(benchmark::State& state) {
    const int years = static_cast<int>(state.range(0));
    const std::vector<Date> dates =
        weekdays({2010, 1, 1}, {2010 + years, 12, 31});
    std::map<std::string, PriceSeries> prices;
    prices["s"] = walk_prices("s", dates, 100.0, 0.012, 32);
    prices["b"] = walk_prices("b", dates, 50.0, 0.004, 32);

    BacktestConfig config;
    config.assets = {"s", "b"};
    config.start = Date{2011, 1, 1};
    config.end = Date{2010 + years, 12, 31};
    config.vol_span = 60;
    config.target_vol = 0.10;
    config.risk_free = 0.0002;

    for (auto _ : state) {
        BacktestResult result = run_backtest(config, prices, month_rho);
        benchmark::DoNotOptimize(result.values.data());
    }
}
BENCHMARK(BM_RunBacktest)->Arg(1)->Arg(5)->Arg(10);

void BM_BestSubsetRegression(benchmark::State& state) {
    const std::vector<Date> dates = weekdays({2017, 1, 1}, {2018, 12, 31});
    const int n = static_cast<int>(state.range(0));
    std::map<std::string, PriceSeries> candidates;
    std::vector<double> blend(dates.size(), 3.0);
    for (int c = 0; c < n; ++c) {
        const std::string name = "c" + std::to_string(c);
        candidates[name] =
            walk_prices(name, dates, 50.0 + c, 0.01, 33 + c);
        for (size_t i = 0; i < dates.size(); ++i)
            blend[i] += (c % 3 == 0 ? 0.4 : 0.05) *
                        candidates[name].observations[i].close;
    }
    PriceSeries target;
    target.ticker = "target";
    for (size_t i = 0; i < dates.size(); ++i)
        target.observations.push_back({dates[i], blend[i]});

    for (auto _ : state) {
        RegressionModel model =
            best_subset_bond_regression(candidates, target, 0.8);
        benchmark::DoNotOptimize(model.out_of_sample_r2);
    }
}
BENCHMARK(BM_BestSubsetRegression)->Arg(4)->Arg(8)->Arg(12);

} // namespace
