#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace corrcast {

// Calendar date. Comparison is chronological.
struct Date {
    int year = 0;
    int month = 0; // 1-12
    int day = 0;   // 1-31

    auto operator<=>(const Date&) const = default;
};

// (year, month) key used for monthly series.
struct MonthKey {
    int year = 0;
    int month = 0; // 1-12

    auto operator<=>(const MonthKey&) const = default;
};

inline MonthKey month_of(const Date& d) { return MonthKey{d.year, d.month}; }

bool is_valid_date(const Date& d);
bool is_valid_month(const MonthKey& m);

// Parses ISO-8601 "YYYY-MM-DD". Throws ParseError on malformed or
// non-calendar input.
Date parse_date(std::string_view text);

// Parses "YYYY-MM". Throws ParseError.
MonthKey parse_month(std::string_view text);

std::string to_string(const Date& d);
std::string to_string(const MonthKey& m);

// Months since year 0, for month arithmetic.
inline int month_index(const MonthKey& m) { return m.year * 12 + (m.month - 1); }

// Key shifted by `delta` calendar months.
MonthKey add_months(const MonthKey& m, int delta);

} // namespace corrcast
