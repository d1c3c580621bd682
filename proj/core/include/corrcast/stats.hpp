#pragma once

#include <array>
#include <string>
#include <vector>

#include "corrcast/correlation.hpp"
#include "corrcast/date.hpp"

namespace corrcast {

// RMSE values over consecutive non-overlapping n-month windows, the unit
// samples of the hypothesis tests.
struct ErrorWindows {
    int n = 1;
    std::string period_label;
    std::vector<double> windows;
    std::vector<MonthKey> months_used; // exactly n * windows.size() months
};

enum class Alternative { ALess, AGreater };

struct TestReport {
    std::string hypothesis;
    int n = 1;
    Variant variant = Variant::V1;
    double t = 0.0;
    double df = 0.0;
    double p = 0.0; // one-sided
    size_t size_a = 0;
    size_t size_b = 0;
};

// Rows are the window lengths, columns the strength variants v1..v3.
struct ExperimentGrid {
    std::string hypothesis;
    std::string scheme_label;
    std::vector<int> ns;
    std::vector<std::array<TestReport, 3>> cells; // one row per entry of ns
};

inline const std::vector<int> default_window_lengths = {1, 3, 6, 12};

// Months [train_first, train_last] train; [test_first, test_last] test.
struct PeriodSplit {
    MonthKey train_first{1980, 1};
    MonthKey train_last{2021, 9};
    MonthKey test_first{2021, 10};
    MonthKey test_last{2024, 6};
};

// One predicted series per strength variant, indexed v1, v2, v3.
using VariantSeries = std::array<CorrelationSeries, 3>;

// Chunks the months shared by both series inside [first, last] into
// consecutive non-overlapping groups of n (trailing partial dropped) and
// takes sqrt(mean squared error) per group; `normalized` false reproduces
// the plain root of the summed squares. Throws InsufficientDataError when no
// complete window fits.
ErrorWindows rmse_windows(const CorrelationSeries& predicted,
                          const CorrelationSeries& realized, int n,
                          const MonthKey& first, const MonthKey& last,
                          bool normalized = true,
                          const std::string& period_label = "");

// Welch unequal-variance t statistic with Welch-Satterthwaite degrees of
// freedom (pooled variant available), one-sided p from the Student-t CDF.
// Throws DegenerateInputError naming the offending sample (fewer than 2
// values or zero variance).
TestReport one_sided_t_test(const std::vector<double>& sample_a,
                            const std::vector<double>& sample_b,
                            Alternative alternative, bool pooled = false);

// CDF of the Student-t distribution via the regularized incomplete beta
// function; exact 0.5 at t = 0.
double student_t_cdf(double t, double df);
double regularized_incomplete_beta(double a, double b, double x);

// Copy of `series` keeping only months present in every series of `others`
// (and in `series` itself), restricted to [first, last].
CorrelationSeries restrict_months(const CorrelationSeries& series,
                                  const std::vector<const CorrelationSeries*>& others,
                                  const MonthKey& first, const MonthKey& last);

// e_train < e_test per n and variant: a significant increase out of sample
// marks look-ahead leakage.
ExperimentGrid experiment_lookahead(const VariantSeries& predicted,
                                    const CorrelationSeries& realized,
                                    const PeriodSplit& split,
                                    const std::string& scheme_label,
                                    const std::vector<int>& ns = default_window_lengths,
                                    bool normalized = true);

// e_without > e_with per n and variant over one period; months are first
// intersected across both predictors and the realized series.
ExperimentGrid experiment_history(const VariantSeries& without_history,
                                  const VariantSeries& with_history,
                                  const CorrelationSeries& realized,
                                  const MonthKey& first, const MonthKey& last,
                                  const std::string& scheme_label,
                                  const std::vector<int>& ns = default_window_lengths,
                                  bool normalized = true);

// e_a < e_b per n and variant over one period (run it once per period),
// months intersected across both predictors and the realized series.
ExperimentGrid experiment_model_comparison(
    const VariantSeries& predicted_a, const VariantSeries& predicted_b,
    const CorrelationSeries& realized, const MonthKey& first,
    const MonthKey& last, const std::string& scheme_label,
    const std::vector<int>& ns = default_window_lengths, bool normalized = true);

// Table layout mirrored from the reports: rows n, columns v1..v3.
std::string grid_to_csv(const ExperimentGrid& grid);

} // namespace corrcast
