#include "corrcast/backtest.hpp"

#include <algorithm>
#include <cmath>

#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"
#include "corrcast/portfolio.hpp"

namespace corrcast {

namespace {

double rate_on(const BacktestConfig& config, const Date& d) {
    if (config.risk_free_series) {
        auto it = std::lower_bound(
            config.risk_free_series->observations.begin(),
            config.risk_free_series->observations.end(), d,
            [](const ReturnPoint& r, const Date& key) { return r.date < key; });
        if (it != config.risk_free_series->observations.end() && it->date == d)
            return it->value;
    }
    return config.risk_free;
}

// EWMA of the available past correlations; neutral 0 when there are none.
double fallback_correlation(const std::vector<double>& past, int span) {
    if (past.empty()) return 0.0;
    const double alpha = 2.0 / (std::max(span, 1) + 1.0);
    const double decay = 1.0 - alpha;
    double weight = 1.0, total = 0.0, mean = 0.0;
    for (size_t k = 0; k < past.size(); ++k) {
        total += weight;
        mean += weight * past[past.size() - 1 - k];
        weight *= decay;
    }
    return mean / total;
}

} // namespace

BacktestResult run_backtest(const BacktestConfig& config,
                            const std::map<std::string, PriceSeries>& prices,
                            const PairPredictionFn& predict) {
    const size_t n = config.assets.size();
    if (n == 0) throw ValidationError("run_backtest: no assets configured");
    if (!(config.start < config.end))
        throw ValidationError("run_backtest: start " + to_string(config.start) +
                              " is not before end " + to_string(config.end));
    if (config.history_months < 0)
        throw DomainError("run_backtest: history_months must be >= 0");

    std::vector<ReturnSeries> returns;
    returns.reserve(n);
    for (const std::string& asset : config.assets) {
        auto it = prices.find(asset);
        if (it == prices.end())
            throw GapError("run_backtest: no price series for asset '" + asset +
                           "'");
        returns.push_back(to_returns(it->second));
    }

    auto has_return_on = [](const ReturnSeries& series, const Date& d) {
        const auto it = std::lower_bound(
            series.observations.begin(), series.observations.end(), d,
            [](const ReturnPoint& r, const Date& key) { return r.date < key; });
        return it != series.observations.end() && it->date == d;
    };

    // Trading days: dates inside the run window where every asset returns.
    std::vector<Date> days;
    for (const ReturnPoint& r : returns[0].observations) {
        if (r.date < config.start || config.end < r.date) continue;
        bool everywhere = true;
        for (size_t i = 1; i < n && everywhere; ++i)
            everywhere = has_return_on(returns[i], r.date);
        if (everywhere) days.push_back(r.date);
    }
    if (days.size() < 2)
        throw InsufficientDataError(
            "run_backtest: only " + std::to_string(days.size()) +
            " common trading days between " + to_string(config.start) + " and " +
            to_string(config.end));

    // Realized monthly correlations per pair over the full data history;
    // rebalances only read months strictly before their own.
    std::map<std::pair<size_t, size_t>, CorrelationSeries> realized;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            const Date first = std::max(returns[i].observations.front().date,
                                        returns[j].observations.front().date);
            realized[{i, j}] = realized_correlation_series(
                returns[i], returns[j], month_of(first), month_of(config.end));
        }

    auto return_on = [&](size_t asset, const Date& d) {
        const auto& obs = returns[asset].observations;
        const auto it = std::lower_bound(
            obs.begin(), obs.end(), d,
            [](const ReturnPoint& r, const Date& key) { return r.date < key; });
        return it->value; // d is a common trading day by construction
    };

    BacktestResult result;
    result.assets = config.assets;
    std::optional<MonthKey> current_month;

    for (const Date& day : days) {
        const MonthKey month = month_of(day);
        if (!current_month || *current_month < month) {
            current_month = month;

            std::vector<std::pair<std::string, double>> vols;
            vols.reserve(n);
            for (size_t i = 0; i < n; ++i)
                vols.emplace_back(config.assets[i],
                                  ewma_volatility(returns[i], config.vol_span, day));

            bool used_fallback = false;
            std::map<std::pair<std::string, std::string>, double> corr;
            for (size_t i = 0; i < n; ++i)
                for (size_t j = i + 1; j < n; ++j) {
                    std::vector<double> past;
                    const CorrelationSeries& series = realized.at({i, j});
                    for (int back = config.history_months; back >= 1; --back) {
                        const auto it =
                            series.values.find(add_months(month, -back));
                        if (it != series.values.end()) past.push_back(it->second);
                    }
                    std::optional<double> rho = predict(
                        config.assets[i], config.assets[j], month, past);
                    if (!rho) {
                        rho = fallback_correlation(past, config.history_months);
                        used_fallback = true;
                        result.log.push_back(
                            "fallback: " + config.assets[i] + "/" +
                            config.assets[j] + " " + to_string(month) +
                            " baseline " + csv::format_double(*rho));
                    }
                    corr[{config.assets[i], config.assets[j]}] = *rho;
                }

            const CovarianceMatrix cov = assemble_covariance(vols, corr);
            const WeightVector raw = n_asset_weights(cov);
            const double annual_vol = portfolio_volatility(cov, raw.weights) *
                                      std::sqrt(config.annualization);
            RebalanceRecord record;
            record.date = day;
            record.month = month;
            record.used_fallback = used_fallback;
            record.weights = scale_weight_vector(raw.weights, config.target_vol,
                                                 annual_vol, record.cash);
            result.rebalances.push_back(std::move(record));
        }

        if (result.dates.empty()) {
            // Base day: the first rebalance marks value 1.0, no return yet.
            result.dates.push_back(day);
            result.values.push_back(1.0);
            result.rf.push_back(0.0);
            continue;
        }

        // Positions take effect after the rebalance close: today's return is
        // earned by the latest rebalance strictly before today.
        const RebalanceRecord* active = nullptr;
        for (auto it = result.rebalances.rbegin(); it != result.rebalances.rend();
             ++it)
            if (it->date < day) {
                active = &*it;
                break;
            }
        const double rf_today = rate_on(config, day);
        double day_return = active->cash * rf_today;
        for (size_t i = 0; i < n; ++i)
            day_return += active->weights(static_cast<Eigen::Index>(i)) *
                          return_on(i, day);

        const double value = result.values.back() * (1.0 + day_return);
        if (!(value > 0.0))
            throw ValidationError("run_backtest: portfolio value " +
                                  csv::format_double(value) + " on " +
                                  to_string(day) + " is not positive");
        result.dates.push_back(day);
        result.values.push_back(value);
        result.rf.push_back(rf_today);
    }
    return result;
}

double sharpe_ratio(const std::vector<double>& values, const std::vector<double>& rf,
                    double annualization) {
    if (values.size() < 2)
        throw InsufficientDataError("sharpe_ratio: need at least 2 values");
    if (rf.size() != values.size())
        throw ValidationError("sharpe_ratio: rf length " +
                              std::to_string(rf.size()) +
                              " does not match values length " +
                              std::to_string(values.size()));

    const size_t n = values.size() - 1;
    std::vector<double> rets(n);
    double mean_excess = 0.0, mean_ret = 0.0;
    for (size_t t = 1; t < values.size(); ++t) {
        rets[t - 1] = values[t] / values[t - 1] - 1.0;
        mean_excess += rets[t - 1] - rf[t];
        mean_ret += rets[t - 1];
    }
    mean_excess /= static_cast<double>(n);
    mean_ret /= static_cast<double>(n);

    if (n < 2)
        throw UndefinedValueError("sharpe_ratio: one return has no variance");
    double var = 0.0;
    for (double r : rets) var += (r - mean_ret) * (r - mean_ret);
    var /= static_cast<double>(n - 1);
    if (!(var > 0.0))
        throw UndefinedValueError("sharpe_ratio: zero return variance");
    return mean_excess / std::sqrt(var) * std::sqrt(annualization);
}

double sharpe_ratio(const std::vector<double>& values, double rf_constant,
                    double annualization) {
    return sharpe_ratio(values, std::vector<double>(values.size(), rf_constant),
                        annualization);
}

std::optional<double> BacktestResult::sharpe(double annualization) const {
    try {
        return sharpe_ratio(values, rf, annualization);
    } catch (const UndefinedValueError&) {
        return std::nullopt;
    } catch (const InsufficientDataError&) {
        return std::nullopt;
    }
}

std::pair<BacktestResult, BacktestResult> split_periods(const BacktestResult& result,
                                                        const Date& cutoff) {
    const auto upper = std::upper_bound(result.dates.begin(), result.dates.end(),
                                        cutoff);
    if (upper == result.dates.begin())
        throw DomainError("split_periods: cutoff " + to_string(cutoff) +
                          " precedes the backtest range");
    const size_t boundary = static_cast<size_t>(upper - result.dates.begin()) - 1;
    if (boundary == 0 || boundary + 1 == result.dates.size())
        throw DomainError("split_periods: cutoff " + to_string(cutoff) +
                          " leaves an empty period");
    const Date boundary_date = result.dates[boundary];

    BacktestResult pre, post;
    pre.assets = post.assets = result.assets;

    pre.dates.assign(result.dates.begin(), result.dates.begin() + boundary + 1);
    pre.values.assign(result.values.begin(),
                      result.values.begin() + boundary + 1);
    pre.rf.assign(result.rf.begin(), result.rf.begin() + boundary + 1);

    post.dates.assign(result.dates.begin() + boundary, result.dates.end());
    const double base = result.values[boundary];
    for (size_t t = boundary; t < result.values.size(); ++t)
        post.values.push_back(result.values[t] / base);
    post.rf.assign(result.rf.begin() + boundary, result.rf.end());
    if (!post.rf.empty()) post.rf[0] = 0.0; // boundary day is post's base day

    for (const RebalanceRecord& record : result.rebalances) {
        if (record.date <= boundary_date)
            pre.rebalances.push_back(record);
        else
            post.rebalances.push_back(record);
    }
    // The rebalance active at the boundary keeps steering early post days.
    if (!pre.rebalances.empty())
        post.rebalances.insert(post.rebalances.begin(), pre.rebalances.back());
    return {std::move(pre), std::move(post)};
}

std::string backtest_values_to_csv(const BacktestResult& result) {
    std::string out = "date,value\n";
    for (size_t t = 0; t < result.dates.size(); ++t) {
        out += to_string(result.dates[t]);
        out += ',';
        out += csv::format_double(result.values[t]);
        out += '\n';
    }
    return out;
}

std::string backtest_weights_to_csv(const BacktestResult& result) {
    std::string out = "year,month,asset,weight\n";
    for (const RebalanceRecord& record : result.rebalances) {
        const std::string prefix = std::to_string(record.month.year) + "," +
                                   std::to_string(record.month.month) + ",";
        for (size_t i = 0; i < result.assets.size(); ++i) {
            out += prefix + result.assets[i] + "," +
                   csv::format_double(
                       record.weights(static_cast<Eigen::Index>(i))) +
                   "\n";
        }
        out += prefix + "cash," + csv::format_double(record.cash) + "\n";
    }
    return out;
}

BacktestResult load_backtest_values(const std::filesystem::path& path) {
    const std::string content = csv::read_file(path);
    BacktestResult result;

    size_t line_no = 0;
    size_t pos = 0;
    bool header_seen = false;
    while (pos <= content.size()) {
        const size_t eol = content.find('\n', pos);
        std::string line = content.substr(
            pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? content.size() + 1 : eol + 1;
        ++line_no;
        if (csv::trim(line).empty()) continue;

        const std::vector<std::string> fields = csv::split_line(line);
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "date" || fields[1] != "value")
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": expected header 'date,value'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 2)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 2 fields");
        try {
            result.dates.push_back(parse_date(fields[0]));
            result.values.push_back(std::stod(fields[1]));
        } catch (const std::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    if (!header_seen)
        throw ParseError(path.string() + ": empty file, expected 'date,value' header");
    result.rf.assign(result.values.size(), 0.0);
    return result;
}

} // namespace corrcast
