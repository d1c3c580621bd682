#pragma once

#include <string>
#include <vector>

#include "corrcast/market_data.hpp"
#include "corrcast/rng.hpp"

namespace corrcast::bench {

inline std::vector<Date> weekdays(const Date& first, const Date& last) {
    static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    auto leap = [](int y) {
        return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    };
    auto days_in = [&](int y, int m) {
        return m == 2 && leap(y) ? 29 : lengths[m - 1];
    };
    // Days since 1970-01-01 (a Thursday), standard civil-calendar arithmetic.
    auto day_number = [](const Date& date) {
        const int y = date.year - (date.month <= 2 ? 1 : 0);
        const long era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy =
            (153u * static_cast<unsigned>(date.month + (date.month > 2 ? -3 : 9)) +
             2u) /
                5u +
            static_cast<unsigned>(date.day) - 1u;
        const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
        return era * 146097 + static_cast<long>(doe) - 719468;
    };
    std::vector<Date> out;
    Date d = first;
    while (d <= last) {
        const int weekday = static_cast<int>(((day_number(d) % 7) + 11) % 7);
        if (weekday != 0 && weekday != 6) out.push_back(d);
        d.day += 1;
        if (d.day > days_in(d.year, d.month)) {
            d.day = 1;
            d.month += 1;
            if (d.month > 12) {
                d.month = 1;
                d.year += 1;
            }
        }
    }
    return out;
}

inline PriceSeries walk_prices(const std::string& ticker,
                               const std::vector<Date>& dates, double level,
                               double scale, uint64_t seed) {
    Rng rng = Rng::fork(seed, ticker);
    PriceSeries series;
    series.ticker = ticker;
    for (const Date& d : dates) {
        level *= 1.0 + scale * rng.normal();
        series.observations.push_back({d, level});
    }
    return series;
}

} // namespace corrcast::bench
