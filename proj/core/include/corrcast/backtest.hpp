#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corrcast/correlation.hpp"
#include "corrcast/date.hpp"
#include "corrcast/market_data.hpp"

namespace corrcast {

// Pairwise correlation prediction queried once per asset pair per rebalance
// month, given the realized correlations of the preceding months (oldest to
// newest). nullopt triggers the logged EWMA fallback.
using PairPredictionFn = std::function<std::optional<double>(
    const std::string& asset_a, const std::string& asset_b,
    const MonthKey& month, const std::vector<double>& past_realized)>;

struct BacktestConfig {
    std::vector<std::string> assets;
    Date start{};
    Date end{};
    int vol_span = 60;       // EWMA span in trading days
    int history_months = 3;  // realized correlations handed to the predictor
    double target_vol = 0.10; // annualized
    double annualization = 252.0;
    double risk_free = 0.0; // constant daily rate for the cash leg
    // Optional daily rate series; dates it misses fall back to the constant.
    std::optional<ReturnSeries> risk_free_series;
};

struct RebalanceRecord {
    Date date;      // first trading day of the month
    MonthKey month;
    Eigen::VectorXd weights; // post-scaling, config asset order
    double cash = 0.0;
    bool used_fallback = false;
};

// Daily value path (base 1.0 on the first rebalance day) with the weights
// history that produced it. `rf` holds the cash-leg rate of the day ending
// at each date (index 0 unused).
struct BacktestResult {
    std::vector<std::string> assets;
    std::vector<Date> dates;
    std::vector<double> values;
    std::vector<double> rf;
    std::vector<RebalanceRecord> rebalances;
    std::vector<std::string> log;

    double pnl() const { return values.empty() ? 0.0 : values.back() - 1.0; }
    // nullopt when the Sharpe ratio is undefined (zero return variance).
    std::optional<double> sharpe(double annualization = 252.0) const;
};

// Monthly rebalanced minimum-variance run: on each month's first trading
// day, EWMA volatilities from data strictly before that day and predicted
// pairwise correlations form the covariance; closed-form weights are scaled
// to the volatility target with the residual in cash. Positions take effect
// after the rebalance day's close, so a day's return is earned by the most
// recent rebalance strictly before it.
BacktestResult run_backtest(const BacktestConfig& config,
                            const std::map<std::string, PriceSeries>& prices,
                            const PairPredictionFn& predict);

// Mean daily excess return over the sample standard deviation of daily
// returns, times sqrt(annualization). `rf` is aligned with `values` (entry 0
// unused). Throws UndefinedValueError on zero variance,
// InsufficientDataError below 2 values.
double sharpe_ratio(const std::vector<double>& values, const std::vector<double>& rf,
                    double annualization = 252.0);
double sharpe_ratio(const std::vector<double>& values, double rf_constant,
                    double annualization = 252.0);

// Splits at the last trading day on or before `cutoff`; both halves share
// that boundary day and are re-based to 1.0 at their own start. Throws
// DomainError when the cutoff leaves either side without a return.
std::pair<BacktestResult, BacktestResult> split_periods(const BacktestResult& result,
                                                        const Date& cutoff);

// Persistence: daily `date,value` CSV and monthly `year,month,asset,weight`
// CSV (the cash leg appears as asset "cash").
std::string backtest_values_to_csv(const BacktestResult& result);
std::string backtest_weights_to_csv(const BacktestResult& result);
// Reads a `date,value` CSV back into a result holding dates and values only.
BacktestResult load_backtest_values(const std::filesystem::path& path);

} // namespace corrcast
