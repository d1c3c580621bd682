#include "corrcast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"

namespace corrcast {

ErrorWindows rmse_windows(const CorrelationSeries& predicted,
                          const CorrelationSeries& realized, int n,
                          const MonthKey& first, const MonthKey& last,
                          bool normalized, const std::string& period_label) {
    if (n < 1) throw DomainError("rmse_windows: n must be >= 1");
    if (last < first)
        throw DomainError("rmse_windows: range " + to_string(first) + ".." +
                          to_string(last) + " is empty");

    // Months carrying a value in BOTH series; a gap on either side drops the
    // month from both (symmetric exclusion).
    std::vector<std::pair<MonthKey, double>> errors;
    for (const auto& [month, value] : predicted.values) {
        if (month < first || last < month) continue;
        const auto it = realized.values.find(month);
        if (it == realized.values.end()) continue;
        errors.emplace_back(month, value - it->second);
    }

    const size_t complete = errors.size() / static_cast<size_t>(n);
    if (complete == 0)
        throw InsufficientDataError(
            "rmse_windows: " + std::to_string(errors.size()) +
            " shared months in " + to_string(first) + ".." + to_string(last) +
            " cannot fill a window of " + std::to_string(n));

    ErrorWindows out;
    out.n = n;
    out.period_label = period_label;
    for (size_t w = 0; w < complete; ++w) {
        double sum = 0.0;
        for (size_t k = 0; k < static_cast<size_t>(n); ++k) {
            const auto& [month, err] = errors[w * static_cast<size_t>(n) + k];
            sum += err * err;
            out.months_used.push_back(month);
        }
        out.windows.push_back(
            std::sqrt(normalized ? sum / static_cast<double>(n) : sum));
    }
    return out;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("regularized_incomplete_beta: parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("regularized_incomplete_beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    // Continued fraction (modified Lentz); converges fastest for
    // x < (a+1)/(a+b+2), the symmetric identity covers the rest.
    const auto continued_fraction = [](double aa, double bb, double xx) {
        constexpr double tiny = 1e-300;
        constexpr double eps = 1e-15;
        const double qab = aa + bb;
        const double qap = aa + 1.0;
        const double qam = aa - 1.0;
        double c = 1.0;
        double d = 1.0 - qab * xx / qap;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= 300; ++m) {
            const double m2 = 2.0 * m;
            double num = m * (bb - m) * xx / ((qam + m2) * (aa + m2));
            d = 1.0 + num * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            num = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2));
            d = 1.0 + num * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double delta = d * c;
            h *= delta;
            if (std::abs(delta - 1.0) < eps) break;
        }
        return h;
    };

    const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                             std::lgamma(b) + a * std::log(x) +
                             b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * continued_fraction(a, b, x) / a;
    return 1.0 - front * continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw DomainError("student_t_cdf: df must be positive");
    if (t == 0.0) return 0.5;
    const double x = df / (df + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
    return t < 0.0 ? tail : 1.0 - tail;
}

namespace {

struct Moments {
    double mean = 0.0;
    double variance = 0.0; // sample variance
    size_t n = 0;
};

Moments moments_of(const std::vector<double>& sample, const char* name) {
    if (sample.size() < 2)
        throw DegenerateInputError(std::string("one_sided_t_test: ") + name +
                                   " has fewer than 2 values");
    Moments m;
    m.n = sample.size();
    for (double v : sample) m.mean += v;
    m.mean /= static_cast<double>(m.n);
    for (double v : sample) m.variance += (v - m.mean) * (v - m.mean);
    m.variance /= static_cast<double>(m.n - 1);
    if (!(m.variance > 0.0))
        throw DegenerateInputError(std::string("one_sided_t_test: ") + name +
                                   " has zero variance");
    return m;
}

} // namespace

TestReport one_sided_t_test(const std::vector<double>& sample_a,
                            const std::vector<double>& sample_b,
                            Alternative alternative, bool pooled) {
    const Moments a = moments_of(sample_a, "sample_a");
    const Moments b = moments_of(sample_b, "sample_b");
    const auto na = static_cast<double>(a.n);
    const auto nb = static_cast<double>(b.n);

    TestReport report;
    report.size_a = a.n;
    report.size_b = b.n;
    if (pooled) {
        const double pooled_var =
            ((na - 1.0) * a.variance + (nb - 1.0) * b.variance) / (na + nb - 2.0);
        report.t = (a.mean - b.mean) /
                   std::sqrt(pooled_var * (1.0 / na + 1.0 / nb));
        report.df = na + nb - 2.0;
    } else {
        const double va = a.variance / na;
        const double vb = b.variance / nb;
        report.t = (a.mean - b.mean) / std::sqrt(va + vb);
        report.df = (va + vb) * (va + vb) /
                    (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    }
    report.p = alternative == Alternative::ALess
                   ? student_t_cdf(report.t, report.df)
                   : 1.0 - student_t_cdf(report.t, report.df);
    return report;
}

CorrelationSeries restrict_months(const CorrelationSeries& series,
                                  const std::vector<const CorrelationSeries*>& others,
                                  const MonthKey& first, const MonthKey& last) {
    CorrelationSeries out;
    out.source = series.source;
    for (const auto& [month, value] : series.values) {
        if (month < first || last < month) continue;
        bool everywhere = true;
        for (const CorrelationSeries* other : others)
            if (!other->values.count(month)) {
                everywhere = false;
                break;
            }
        if (everywhere) out.values[month] = value;
    }
    return out;
}

namespace {

ExperimentGrid run_grid(
    const std::string& hypothesis, const std::string& scheme_label,
    const std::vector<int>& ns,
    const std::function<std::pair<std::vector<double>, std::vector<double>>(
        int, size_t)>& samples_for,
    Alternative alternative) {
    ExperimentGrid grid;
    grid.hypothesis = hypothesis;
    grid.scheme_label = scheme_label;
    grid.ns = ns;
    for (int n : ns) {
        std::array<TestReport, 3> row;
        for (size_t v = 0; v < 3; ++v) {
            const auto [a, b] = samples_for(n, v);
            row[v] = one_sided_t_test(a, b, alternative);
            row[v].hypothesis = hypothesis;
            row[v].n = n;
            row[v].variant = static_cast<Variant>(v + 1);
        }
        grid.cells.push_back(row);
    }
    return grid;
}

} // namespace

ExperimentGrid experiment_lookahead(const VariantSeries& predicted,
                                    const CorrelationSeries& realized,
                                    const PeriodSplit& split,
                                    const std::string& scheme_label,
                                    const std::vector<int>& ns, bool normalized) {
    return run_grid(
        "lookahead", scheme_label, ns,
        [&](int n, size_t v) {
            const ErrorWindows train =
                rmse_windows(predicted[v], realized, n, split.train_first,
                             split.train_last, normalized, "train");
            const ErrorWindows test =
                rmse_windows(predicted[v], realized, n, split.test_first,
                             split.test_last, normalized, "test");
            return std::make_pair(train.windows, test.windows);
        },
        Alternative::ALess);
}

ExperimentGrid experiment_history(const VariantSeries& without_history,
                                  const VariantSeries& with_history,
                                  const CorrelationSeries& realized,
                                  const MonthKey& first, const MonthKey& last,
                                  const std::string& scheme_label,
                                  const std::vector<int>& ns, bool normalized) {
    return run_grid(
        "history", scheme_label, ns,
        [&](int n, size_t v) {
            const CorrelationSeries without = restrict_months(
                without_history[v], {&with_history[v], &realized}, first, last);
            const CorrelationSeries with = restrict_months(
                with_history[v], {&without_history[v], &realized}, first, last);
            const ErrorWindows e_without =
                rmse_windows(without, realized, n, first, last, normalized,
                             "without");
            const ErrorWindows e_with = rmse_windows(with, realized, n, first,
                                                     last, normalized, "with");
            return std::make_pair(e_without.windows, e_with.windows);
        },
        Alternative::AGreater);
}

ExperimentGrid experiment_model_comparison(
    const VariantSeries& predicted_a, const VariantSeries& predicted_b,
    const CorrelationSeries& realized, const MonthKey& first,
    const MonthKey& last, const std::string& scheme_label,
    const std::vector<int>& ns, bool normalized) {
    return run_grid(
        "model_comparison", scheme_label, ns,
        [&](int n, size_t v) {
            const CorrelationSeries a = restrict_months(
                predicted_a[v], {&predicted_b[v], &realized}, first, last);
            const CorrelationSeries b = restrict_months(
                predicted_b[v], {&predicted_a[v], &realized}, first, last);
            const ErrorWindows e_a =
                rmse_windows(a, realized, n, first, last, normalized, "a");
            const ErrorWindows e_b =
                rmse_windows(b, realized, n, first, last, normalized, "b");
            return std::make_pair(e_a.windows, e_b.windows);
        },
        Alternative::ALess);
}

std::string grid_to_csv(const ExperimentGrid& grid) {
    std::string out = "n,v1,v2,v3\n";
    for (size_t row = 0; row < grid.ns.size(); ++row) {
        out += std::to_string(grid.ns[row]);
        for (const TestReport& cell : grid.cells[row]) {
            out += ',';
            out += csv::format_double(cell.p);
        }
        out += '\n';
    }
    return out;
}

} // namespace corrcast
