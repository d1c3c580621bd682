#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corrcast/date.hpp"
#include "corrcast/market_data.hpp"

namespace corrcast {

// Discretization of correlation values: 3 classes mapping to {-1, 0, +1} or
// 11 bins on a uniform grid over [-1, 1].
enum class CodingScheme { ThreeLevel, ElevenBin };

int class_count(CodingScheme scheme);

// Strength-scaling variants applied to a predicted class value c with
// probability p: v1 keeps c, v2 uses p*c, v3 uses (2p-1)*c.
enum class Variant { V1 = 1, V2 = 2, V3 = 3 };

std::string to_string(Variant v);
std::string to_string(CodingScheme scheme);

// Per-month correlation values for one source (realized, or a predictor
// variant). Every value lies in [-1, 1].
struct CorrelationSeries {
    std::string source;
    std::map<MonthKey, double> values;

    bool empty() const { return values.empty(); }
    size_t size() const { return values.size(); }
};

// Pearson correlation of the two return series over the days of `month`
// present in both. Throws InsufficientDataError below 3 overlapping days,
// UndefinedValueError when either leg has zero variance.
double realized_monthly_correlation(const ReturnSeries& stock,
                                    const ReturnSeries& bond,
                                    const MonthKey& month);

// Realized correlation for every month in [first, last]; months with too few
// overlapping days or zero variance are omitted.
CorrelationSeries realized_correlation_series(const ReturnSeries& stock,
                                              const ReturnSeries& bond,
                                              const MonthKey& first,
                                              const MonthKey& last);

// Three-level: {0 -> -1, 1 -> 0, 2 -> +1}. Eleven-bin: k -> -1 + k/5.
// Throws DomainError for a class outside the scheme's range.
double class_to_correlation(int cls, CodingScheme scheme);

// Nearest class under class_to_correlation's grid; exact midpoints go to the
// lower class index. Throws DomainError when rho is outside [-1, 1].
int round_to_class(double rho, CodingScheme scheme);

// Throws DomainError when p is outside [0, 1].
double strength_scaled(double c, double p, Variant variant);

// Arithmetic mean clamped to [-1, 1]. Throws InsufficientDataError on an
// empty list.
double aggregate_month(const std::vector<double>& per_article);

// CSV persistence, header `year,month,value`; the source label lives in the
// filename `<source>.csv`.
std::string correlation_series_to_csv(const CorrelationSeries& series);
CorrelationSeries load_correlation_csv(const std::filesystem::path& path);
void save_correlation_csv(const CorrelationSeries& series,
                          const std::filesystem::path& path);

} // namespace corrcast
