#include "corrcast/market_data.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"

namespace corrcast {

std::optional<double> PriceSeries::value_on(const Date& d) const {
    auto it = std::lower_bound(
        observations.begin(), observations.end(), d,
        [](const PricePoint& p, const Date& key) { return p.date < key; });
    if (it == observations.end() || !(it->date == d)) return std::nullopt;
    return it->close;
}

PriceSeries load_price_csv(const std::filesystem::path& path) {
    const std::string content = csv::read_file(path);
    PriceSeries series;
    series.ticker = path.stem().string();

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
            if (fields.size() != 2 || fields[0] != "date" || fields[1] != "close")
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": expected header 'date,close'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 2)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 2 fields, got " +
                             std::to_string(fields.size()));
        PricePoint point;
        try {
            point.date = parse_date(fields[0]);
            size_t consumed = 0;
            point.close = std::stod(fields[1], &consumed);
            if (consumed != fields[1].size())
                throw ParseError("trailing characters in price");
        } catch (const std::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": " + e.what());
        }
        series.observations.push_back(point);
    }
    if (!header_seen)
        throw ParseError(path.string() + ": empty file, expected 'date,close' header");

    std::stable_sort(series.observations.begin(), series.observations.end(),
                     [](const PricePoint& a, const PricePoint& b) {
                         return a.date < b.date;
                     });
    for (size_t i = 0; i < series.observations.size(); ++i) {
        const PricePoint& p = series.observations[i];
        if (!(p.close > 0.0))
            throw ValidationError(path.string() + ": nonpositive price " +
                                  csv::format_double(p.close) + " on " +
                                  to_string(p.date));
        if (i > 0 && series.observations[i - 1].date == p.date)
            throw ValidationError(path.string() + ": duplicate date " +
                                  to_string(p.date));
    }
    return series;
}

std::string price_series_to_csv(const PriceSeries& series) {
    std::string out = "date,close\n";
    for (const PricePoint& p : series.observations) {
        out += to_string(p.date);
        out += ',';
        out += csv::format_double(p.close);
        out += '\n';
    }
    return out;
}

ReturnSeries to_returns(const PriceSeries& prices) {
    if (prices.size() < 2)
        throw InsufficientDataError("to_returns: need at least 2 observations, have " +
                                    std::to_string(prices.size()));
    ReturnSeries out;
    out.ticker = prices.ticker;
    out.observations.reserve(prices.size() - 1);
    for (size_t i = 1; i < prices.size(); ++i) {
        const double prev = prices.observations[i - 1].close;
        out.observations.push_back(
            {prices.observations[i].date, prices.observations[i].close / prev - 1.0});
    }
    return out;
}

double ewma_volatility(const ReturnSeries& returns, int span, const Date& as_of) {
    if (span < 1) throw DomainError("ewma_volatility: span must be >= 1");
    // Observations strictly before as_of; nothing from as_of itself leaks in.
    auto end = std::lower_bound(
        returns.observations.begin(), returns.observations.end(), as_of,
        [](const ReturnPoint& r, const Date& key) { return r.date < key; });
    const auto count = static_cast<size_t>(end - returns.observations.begin());
    if (count < static_cast<size_t>(span))
        throw InsufficientDataError(
            "ewma_volatility: need " + std::to_string(span) +
            " observations before " + to_string(as_of) + ", have " +
            std::to_string(count));

    const double alpha = 2.0 / (span + 1.0);
    const double decay = 1.0 - alpha;
    double weight = 1.0; // (1-alpha)^k, k = 0 at the most recent observation
    double total = 0.0, mean = 0.0;
    std::vector<double> weights(count);
    for (size_t k = 0; k < count; ++k) {
        weights[k] = weight;
        total += weight;
        mean += weight * returns.observations[count - 1 - k].value;
        weight *= decay;
    }
    mean /= total;
    double var = 0.0;
    for (size_t k = 0; k < count; ++k) {
        const double d = returns.observations[count - 1 - k].value - mean;
        var += weights[k] / total * d * d;
    }
    return std::sqrt(var);
}

double RegressionModel::predict(const std::map<std::string, double>& values) const {
    double level = intercept;
    for (size_t i = 0; i < predictors.size(); ++i) {
        auto it = values.find(predictors[i]);
        if (it == values.end())
            throw GapError("predict: no value for predictor '" + predictors[i] + "'");
        level += coefficients[i] * it->second;
    }
    return level;
}

namespace {

struct AlignedPanel {
    std::vector<Date> dates;
    Eigen::VectorXd target;  // aligned target levels
    Eigen::MatrixXd columns; // one column per candidate, map order
};

AlignedPanel align_on_common_dates(const std::map<std::string, PriceSeries>& candidates,
                                   const PriceSeries& target) {
    AlignedPanel panel;
    std::vector<double> y;
    std::vector<std::vector<double>> cols(candidates.size());
    for (const PricePoint& p : target.observations) {
        std::vector<double> row;
        row.reserve(candidates.size());
        bool complete = true;
        for (const auto& [name, series] : candidates) {
            const std::optional<double> v = series.value_on(p.date);
            if (!v) {
                complete = false;
                break;
            }
            row.push_back(*v);
        }
        if (!complete) continue;
        panel.dates.push_back(p.date);
        y.push_back(p.close);
        for (size_t j = 0; j < row.size(); ++j) cols[j].push_back(row[j]);
    }
    if (panel.dates.empty())
        throw AlignmentError("best_subset_bond_regression: no dates shared by the "
                             "target and every candidate");
    panel.target = Eigen::Map<Eigen::VectorXd>(y.data(),
                                               static_cast<Eigen::Index>(y.size()));
    panel.columns.resize(static_cast<Eigen::Index>(y.size()),
                         static_cast<Eigen::Index>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j)
        panel.columns.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<Eigen::VectorXd>(cols[j].data(),
                                        static_cast<Eigen::Index>(cols[j].size()));
    return panel;
}

std::string subset_label(const std::vector<std::string>& names, uint32_t mask) {
    std::string label = "{";
    for (size_t j = 0; j < names.size(); ++j) {
        if (!(mask & (1u << j))) continue;
        if (label.size() > 1) label += ", ";
        label += names[j];
    }
    return label + "}";
}

} // namespace

RegressionModel best_subset_bond_regression(
    const std::map<std::string, PriceSeries>& candidates,
    const PriceSeries& target, double split_fraction) {
    const size_t k = candidates.size();
    if (k < 1 || k > 12)
        throw DomainError("best_subset_bond_regression: candidate count " +
                          std::to_string(k) + " outside 1..12");
    if (!(split_fraction > 0.0 && split_fraction < 1.0))
        throw DomainError("best_subset_bond_regression: split_fraction must be in (0,1)");

    std::vector<std::string> names;
    names.reserve(k);
    for (const auto& [name, series] : candidates) names.push_back(name);

    const AlignedPanel panel = align_on_common_dates(candidates, target);
    const auto n = static_cast<Eigen::Index>(panel.dates.size());
    const auto n_train = static_cast<Eigen::Index>(
        static_cast<double>(n) * split_fraction);
    const Eigen::Index n_test = n - n_train;
    if (n_train < 1 || n_test < 1)
        throw InsufficientDataError(
            "best_subset_bond_regression: overlap of " + std::to_string(n) +
            " dates is too small to split " + csv::format_double(split_fraction));

    const Eigen::VectorXd y_test = panel.target.segment(n_train, n_test);
    const double test_mean = y_test.mean();
    const double ss_tot = (y_test.array() - test_mean).square().sum();

    RegressionModel best;
    bool have_best = false;
    double best_r2 = 0.0;
    std::vector<size_t> best_idx;
    constexpr double tie_eps = 1e-9;

    for (uint32_t mask = 1; mask < (1u << k); ++mask) {
        std::vector<size_t> idx;
        for (size_t j = 0; j < k; ++j)
            if (mask & (1u << j)) idx.push_back(j);
        const auto p = static_cast<Eigen::Index>(idx.size());

        Eigen::MatrixXd x_train(n_train, p + 1);
        x_train.col(0).setOnes();
        for (Eigen::Index j = 0; j < p; ++j)
            x_train.col(j + 1) = panel.columns.col(
                static_cast<Eigen::Index>(idx[static_cast<size_t>(j)])).head(n_train);

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x_train);
        if (qr.rank() < p + 1) {
            best.warnings.push_back("skipped singular subset " +
                                    subset_label(names, mask));
            continue;
        }
        const Eigen::VectorXd beta = qr.solve(panel.target.head(n_train));

        Eigen::VectorXd predicted = Eigen::VectorXd::Constant(n_test, beta(0));
        for (Eigen::Index j = 0; j < p; ++j)
            predicted += beta(j + 1) *
                         panel.columns.col(static_cast<Eigen::Index>(
                                               idx[static_cast<size_t>(j)]))
                             .segment(n_train, n_test);
        if (!(ss_tot > 0.0)) {
            best.warnings.push_back("skipped subset " + subset_label(names, mask) +
                                    ": constant test target");
            continue;
        }
        const double r2 = 1.0 - (y_test - predicted).squaredNorm() / ss_tot;

        bool take = false;
        if (!have_best || r2 > best_r2 + tie_eps) {
            take = true;
        } else if (r2 >= best_r2 - tie_eps) {
            if (idx.size() < best_idx.size()) {
                take = true;
            } else if (idx.size() == best_idx.size()) {
                std::vector<std::string> mine, theirs;
                for (size_t j : idx) mine.push_back(names[j]);
                for (size_t j : best_idx) theirs.push_back(names[j]);
                take = mine < theirs;
            }
        }
        if (take) {
            have_best = true;
            best_r2 = r2;
            best_idx = idx;
            best.predictors.clear();
            best.coefficients.clear();
            for (Eigen::Index j = 0; j < p; ++j) {
                best.predictors.push_back(names[idx[static_cast<size_t>(j)]]);
                best.coefficients.push_back(beta(j + 1));
            }
            best.intercept = beta(0);
            best.out_of_sample_r2 = r2;
        }
    }
    if (!have_best)
        throw ConditioningError(
            "best_subset_bond_regression: every candidate subset was skipped");
    return best;
}

PriceSeries backfill_prices(const RegressionModel& model,
                            const std::map<std::string, PriceSeries>& candidates,
                            const PriceSeries& target,
                            const std::vector<Date>& dates) {
    if (target.empty())
        throw InsufficientDataError("backfill_prices: target series is empty");
    const Date first = target.observations.front().date;

    std::vector<Date> wanted(dates);
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    PriceSeries out;
    out.ticker = target.ticker;
    std::string gaps;
    for (const Date& d : wanted) {
        if (!(d < first)) continue; // the observed target always wins
        std::map<std::string, double> values;
        for (const std::string& name : model.predictors) {
            auto it = candidates.find(name);
            const std::optional<double> v =
                it == candidates.end() ? std::nullopt : it->second.value_on(d);
            if (!v) {
                gaps += (gaps.empty() ? "" : ", ");
                gaps += name + "@" + to_string(d);
                continue;
            }
            values[name] = *v;
        }
        if (!gaps.empty()) continue;
        const double level = model.predict(values);
        if (!(level > 0.0))
            throw ValidationError("backfill_prices: nonpositive predicted level " +
                                  csv::format_double(level) + " on " + to_string(d));
        out.observations.push_back({d, level});
    }
    if (!gaps.empty())
        throw GapError("backfill_prices: missing candidate values: " + gaps);
    out.observations.insert(out.observations.end(), target.observations.begin(),
                            target.observations.end());
    return out;
}

} // namespace corrcast
