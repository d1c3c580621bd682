#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corrcast/date.hpp"

namespace corrcast {

struct PricePoint {
    Date date;
    double close = 0.0;
};

// Dated adjusted-close observations for one ticker. Dates strictly
// increasing, prices strictly positive, no duplicates.
struct PriceSeries {
    std::string ticker;
    std::vector<PricePoint> observations;

    bool empty() const { return observations.empty(); }
    size_t size() const { return observations.size(); }
    std::optional<double> value_on(const Date& d) const;
};

struct ReturnPoint {
    Date date;
    double value = 0.0; // simple daily percent change
};

// Daily simple returns; each observation is dated by the later of the two
// prices it was computed from.
struct ReturnSeries {
    std::string ticker;
    std::vector<ReturnPoint> observations;

    bool empty() const { return observations.empty(); }
    size_t size() const { return observations.size(); }
};

// Result of the best-subset search: the chosen predictors, their OLS fit
// and its out-of-sample R^2.
struct RegressionModel {
    std::vector<std::string> predictors; // lexicographically sorted
    std::vector<double> coefficients;    // aligned with `predictors`
    double intercept = 0.0;
    double out_of_sample_r2 = 0.0;
    std::vector<std::string> warnings; // subsets skipped as singular, etc.

    double predict(const std::map<std::string, double>& values) const;
};

// Sorts rows by date and enforces the series invariants.
// Throws ParseError (malformed row, with line number) or ValidationError
// (duplicate date, nonpositive price).
PriceSeries load_price_csv(const std::filesystem::path& path);

// Canonical `date,close` CSV content for a series (what `load_price_csv`
// reads back).
std::string price_series_to_csv(const PriceSeries& series);

// r_t = p_t / p_{t-1} - 1. Throws InsufficientDataError below 2 observations.
ReturnSeries to_returns(const PriceSeries& prices);

// Exponentially weighted standard deviation of the daily returns strictly
// before `as_of`, smoothing alpha = 2/(span+1), weights normalized and the
// variance taken about the weighted mean. Throws InsufficientDataError when
// fewer than `span` observations precede `as_of`.
double ewma_volatility(const ReturnSeries& returns, int span, const Date& as_of);

// Exhaustive best-subset OLS of the target levels on every nonempty subset
// of candidate level series. The overlap of all series is split
// chronologically (first `split_fraction` of dates trains, the rest
// evaluates out-of-sample R^2). Returns the subset with the highest
// out-of-sample R^2; ties within 1e-9 prefer fewer predictors, then
// lexicographic order. Singular design matrices are skipped with a warning.
// Throws AlignmentError on empty overlap, DomainError above 12 candidates.
RegressionModel best_subset_bond_regression(
    const std::map<std::string, PriceSeries>& candidates,
    const PriceSeries& target, double split_fraction = 0.8);

// Predicted index levels for every requested date strictly before the
// target's first observation, spliced with the original target (which always
// wins on overlap). Throws GapError listing dates where a selected candidate
// has no value.
PriceSeries backfill_prices(const RegressionModel& model,
                            const std::map<std::string, PriceSeries>& candidates,
                            const PriceSeries& target,
                            const std::vector<Date>& dates);

} // namespace corrcast
