#include "corrcast/date.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "corrcast/errors.hpp"

namespace corrcast {

namespace {

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                  31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return kDays[static_cast<size_t>(month - 1)];
}

int parse_int_field(std::string_view text, size_t pos, size_t len,
                    std::string_view what) {
    if (pos + len > text.size()) {
        throw ParseError("date field '" + std::string(what) + "' truncated in '" +
                         std::string(text) + "'");
    }
    for (size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            throw ParseError("non-digit in date field '" + std::string(what) +
                             "' of '" + std::string(text) + "'");
        }
    }
    int value = 0;
    std::from_chars(text.data() + pos, text.data() + pos + len, value);
    return value;
}

} // namespace

bool is_valid_month(const MonthKey& m) { return m.month >= 1 && m.month <= 12; }

bool is_valid_date(const Date& d) {
    return is_valid_month(MonthKey{d.year, d.month}) && d.day >= 1 &&
           d.day <= days_in_month(d.year, d.month);
}

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ParseError("expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    Date d;
    d.year = parse_int_field(text, 0, 4, "year");
    d.month = parse_int_field(text, 5, 2, "month");
    d.day = parse_int_field(text, 8, 2, "day");
    if (!is_valid_date(d)) {
        throw ParseError("not a calendar date: '" + std::string(text) + "'");
    }
    return d;
}

MonthKey parse_month(std::string_view text) {
    if (text.size() != 7 || text[4] != '-') {
        throw ParseError("expected YYYY-MM, got '" + std::string(text) + "'");
    }
    MonthKey m;
    m.year = parse_int_field(text, 0, 4, "year");
    m.month = parse_int_field(text, 5, 2, "month");
    if (!is_valid_month(m)) {
        throw ParseError("not a calendar month: '" + std::string(text) + "'");
    }
    return m;
}

std::string to_string(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

std::string to_string(const MonthKey& m) {
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", m.year, m.month);
    return buf;
}

MonthKey add_months(const MonthKey& m, int delta) {
    const int idx = month_index(m) + delta;
    MonthKey out;
    out.year = idx / 12;
    out.month = idx % 12 + 1;
    if (out.month <= 0) { // negative division toward zero
        out.year -= 1;
        out.month += 12;
    }
    return out;
}

} // namespace corrcast
