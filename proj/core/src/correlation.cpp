#include "corrcast/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"

namespace corrcast {

int class_count(CodingScheme scheme) {
    return scheme == CodingScheme::ThreeLevel ? 3 : 11;
}

std::string to_string(Variant v) {
    switch (v) {
    case Variant::V1: return "v1";
    case Variant::V2: return "v2";
    case Variant::V3: return "v3";
    }
    throw DomainError("unknown variant");
}

std::string to_string(CodingScheme scheme) {
    return scheme == CodingScheme::ThreeLevel ? "original" : "bins";
}

double realized_monthly_correlation(const ReturnSeries& stock,
                                    const ReturnSeries& bond,
                                    const MonthKey& month) {
    std::vector<double> s, b;
    auto bi = bond.observations.begin();
    for (const ReturnPoint& r : stock.observations) {
        if (!(month_of(r.date) == month)) continue;
        while (bi != bond.observations.end() && bi->date < r.date) ++bi;
        if (bi == bond.observations.end()) break;
        if (bi->date == r.date) {
            s.push_back(r.value);
            b.push_back(bi->value);
        }
    }
    const size_t n = s.size();
    if (n < 3)
        throw InsufficientDataError(
            "realized_monthly_correlation: " + to_string(month) + " has " +
            std::to_string(n) + " overlapping days, need 3");

    double mean_s = 0.0, mean_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_s += s[i];
        mean_b += b[i];
    }
    mean_s /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    double ss = 0.0, bb = 0.0, sb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double ds = s[i] - mean_s;
        const double db = b[i] - mean_b;
        ss += ds * ds;
        bb += db * db;
        sb += ds * db;
    }
    if (!(ss > 0.0) || !(bb > 0.0))
        throw UndefinedValueError("realized_monthly_correlation: zero variance in " +
                                  std::string(!(ss > 0.0) ? "stock" : "bond") +
                                  " leg during " + to_string(month));
    return std::clamp(sb / std::sqrt(ss * bb), -1.0, 1.0);
}

CorrelationSeries realized_correlation_series(const ReturnSeries& stock,
                                              const ReturnSeries& bond,
                                              const MonthKey& first,
                                              const MonthKey& last) {
    CorrelationSeries series;
    series.source = "realized";
    for (int idx = month_index(first); idx <= month_index(last); ++idx) {
        const MonthKey m{idx / 12, idx % 12 + 1};
        try {
            series.values[m] = realized_monthly_correlation(stock, bond, m);
        } catch (const InsufficientDataError&) {
        } catch (const UndefinedValueError&) {
        }
    }
    return series;
}

double class_to_correlation(int cls, CodingScheme scheme) {
    if (cls < 0 || cls >= class_count(scheme))
        throw DomainError("class_to_correlation: class " + std::to_string(cls) +
                          " out of range for " + to_string(scheme));
    if (scheme == CodingScheme::ThreeLevel) return static_cast<double>(cls - 1);
    return -1.0 + static_cast<double>(cls) / 5.0;
}

int round_to_class(double rho, CodingScheme scheme) {
    if (!(rho >= -1.0 && rho <= 1.0))
        throw DomainError("round_to_class: rho " + csv::format_double(rho) +
                          " outside [-1, 1]");
    int best = 0;
    double best_dist = std::abs(rho - class_to_correlation(0, scheme));
    for (int cls = 1; cls < class_count(scheme); ++cls) {
        const double dist = std::abs(rho - class_to_correlation(cls, scheme));
        if (dist < best_dist) {
            best = cls;
            best_dist = dist;
        }
    }
    return best;
}

double strength_scaled(double c, double p, Variant variant) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("strength_scaled: probability " + csv::format_double(p) +
                          " outside [0, 1]");
    switch (variant) {
    case Variant::V1: return c;
    case Variant::V2: return p * c;
    case Variant::V3: return (2.0 * p - 1.0) * c;
    }
    throw DomainError("strength_scaled: unknown variant");
}

double aggregate_month(const std::vector<double>& per_article) {
    if (per_article.empty())
        throw InsufficientDataError("aggregate_month: empty article list");
    double sum = 0.0;
    for (double v : per_article) sum += v;
    return std::clamp(sum / static_cast<double>(per_article.size()), -1.0, 1.0);
}

std::string correlation_series_to_csv(const CorrelationSeries& series) {
    std::string out = "year,month,value\n";
    for (const auto& [month, value] : series.values) {
        out += std::to_string(month.year);
        out += ',';
        out += std::to_string(month.month);
        out += ',';
        out += csv::format_double(value);
        out += '\n';
    }
    return out;
}

CorrelationSeries load_correlation_csv(const std::filesystem::path& path) {
    const std::string content = csv::read_file(path);
    CorrelationSeries series;
    series.source = path.stem().string();

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
            if (fields.size() != 3 || fields[0] != "year" || fields[1] != "month" ||
                fields[2] != "value")
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": expected header 'year,month,value'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 3)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 3 fields, got " +
                             std::to_string(fields.size()));
        MonthKey month{};
        double value = 0.0;
        try {
            month.year = std::stoi(fields[0]);
            month.month = std::stoi(fields[1]);
            size_t consumed = 0;
            value = std::stod(fields[2], &consumed);
            if (consumed != fields[2].size())
                throw ParseError("trailing characters in value");
        } catch (const std::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
        if (!is_valid_month(month))
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": invalid month " + to_string(month));
        if (!(value >= -1.0 && value <= 1.0))
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": value " + fields[2] + " outside [-1, 1]");
        if (series.values.count(month))
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": duplicate month " + to_string(month));
        series.values[month] = value;
    }
    if (!header_seen)
        throw ParseError(path.string() + ": empty file, expected 'year,month,value' header");
    return series;
}

void save_correlation_csv(const CorrelationSeries& series,
                          const std::filesystem::path& path) {
    csv::write_file_if_changed(path, correlation_series_to_csv(series));
}

} // namespace corrcast
